/**
 * Shapes of the lens document consumed by the viewer.
 *
 * The document is the renderer's export: full geometry in world
 * coordinates plus the series, palette, and encoding flags needed to
 * recompute cell colors client-side. Only schema_version 1 is accepted.
 */

export interface CellPart {
  polygon: number[][];
  color: string;
}

export interface LensCell {
  ribbon: number;
  facade: number;
  value: number;
  parts: CellPart[];
}

export interface FacadeSeries {
  facade: number;
  values: number[];
}

export interface FilterRange {
  lo: number;
  hi: number;
  p: number;
}

export interface LensGlyph {
  at: [number, number];
  dir: [number, number];
  node: string;
  theta: number;
}

export interface SectorCurve {
  node: string;
  points: number[][];
}

export interface LensDocument {
  schema_version: number;
  footprint: number[][];
  bounds: [number, number, number, number];
  n_ribbons: number;
  levels: number[];
  time_direction: string;
  assignment: number[];
  palette: string[];
  normalization: { vmin: number; vmax: number };
  filter: FilterRange | null;
  two_tone: boolean;
  cyclic: boolean;
  series: FacadeSeries[];
  cells: LensCell[];
  core: number[][][];
  sectors: SectorCurve[];
  glyphs: LensGlyph[];
}

const REQUIRED_KEYS = [
  'schema_version', 'footprint', 'bounds', 'n_ribbons', 'levels',
  'time_direction', 'assignment', 'palette', 'normalization', 'filter',
  'two_tone', 'cyclic', 'series', 'cells', 'core', 'sectors', 'glyphs',
] as const;

export function parseLensDocument(text: string): LensDocument {
  const doc = JSON.parse(text) as Record<string, unknown>;
  if (doc === null || typeof doc !== 'object' || Array.isArray(doc)) {
    throw new Error('lens document must be a JSON object');
  }
  if (doc.schema_version !== 1) {
    throw new Error(`unsupported lens document schema ${JSON.stringify(doc.schema_version)}`);
  }
  for (const key of REQUIRED_KEYS) {
    if (!(key in doc)) {
      throw new Error(`lens document is missing "${key}"`);
    }
  }
  const lens = doc as unknown as LensDocument;
  if (lens.assignment.length !== lens.n_ribbons) {
    throw new Error('assignment length does not match the ribbon count');
  }
  for (const s of lens.series) {
    if (s.values.length !== lens.n_ribbons) {
      throw new Error(`facade ${s.facade} series has ${s.values.length} values for ${lens.n_ribbons} ribbons`);
    }
  }
  return lens;
}
