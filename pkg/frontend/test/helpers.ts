import { readFileSync } from 'node:fs';
import { parseLensDocument } from '../src/types.js';
import type { LensDocument } from '../src/types.js';

export function readFixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), 'utf8');
}

export function loadSquareDoc(): LensDocument {
  return parseLensDocument(readFixture('square_viewer.json'));
}

export interface CliState {
  order: string;
  filter: [number, number, number] | null;
  assignment: number[];
  colors: Record<string, string>;
}

export interface CliStatesFixture {
  random_states: CliState[];
  fixed_states: CliState[];
}

export function loadCliStates(): CliStatesFixture {
  return JSON.parse(readFixture('cli_states.json')) as CliStatesFixture;
}

export type TwoToneTable = Record<string, [string, string, number]>;

export function loadTwoTone(): { plain: TwoToneTable; filtered: TwoToneTable } {
  return JSON.parse(readFixture('two_tone.json'));
}

/** Deterministic uniform [0, 1) generator for fuzzing. */
export function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (s * 1664525 + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}
