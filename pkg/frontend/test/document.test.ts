import { describe, expect, test } from 'vitest';
import { parseLensDocument } from '../src/types.js';
import { loadSquareDoc, readFixture } from './helpers.js';

describe('lens document parsing', () => {
  test('accepts the exported square document', () => {
    const doc = loadSquareDoc();
    expect(doc.schema_version).toBe(1);
    expect(doc.n_ribbons).toBe(4);
    expect(doc.cells).toHaveLength(16);
    expect(doc.palette).toHaveLength(7);
    expect(doc.series.map((s) => s.facade)).toEqual([0, 1, 2, 3]);
  });

  test('rejects other schema versions', () => {
    const doc = JSON.parse(readFixture('square_viewer.json'));
    doc.schema_version = 2;
    expect(() => parseLensDocument(JSON.stringify(doc))).toThrow(/schema 2/);
  });

  test('rejects missing keys', () => {
    const doc = JSON.parse(readFixture('square_viewer.json'));
    delete doc.cells;
    expect(() => parseLensDocument(JSON.stringify(doc))).toThrow(/"cells"/);
  });

  test('rejects mismatched assignment and series lengths', () => {
    const base = JSON.parse(readFixture('square_viewer.json'));
    const shortAssign = { ...base, assignment: [0, 1] };
    expect(() => parseLensDocument(JSON.stringify(shortAssign)))
      .toThrow(/assignment length/);
    const shortSeries = JSON.parse(readFixture('square_viewer.json'));
    shortSeries.series[0].values = [1.0];
    expect(() => parseLensDocument(JSON.stringify(shortSeries)))
      .toThrow(/facade 0 series/);
  });

  test('rejects non-object documents', () => {
    expect(() => parseLensDocument('[1, 2]')).toThrow(/JSON object/);
  });
});
