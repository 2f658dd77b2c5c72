/**
 * Ribbon-to-time assignments, matching the renderer's reorder semantics.
 *
 * An assignment maps ribbon index (0 = outermost) to the time step it
 * displays. Chronological order, attribute-keyed order, and cyclic
 * wrapping reproduce the permutations the CLI's --order flag yields, so
 * a viewer state is always replayable through the command line.
 */

import { pyMod } from './colors.js';
import type { FacadeSeries } from './types.js';

export type Aggregate = 'mean' | 'max' | 'min';

export function chronoAssignment(n: number, timeDirection: string): number[] {
  if (timeDirection === 'inner-earliest') {
    return Array.from({ length: n }, (_, r) => n - 1 - r);
  }
  if (timeDirection === 'outer-earliest') {
    return Array.from({ length: n }, (_, r) => r);
  }
  throw new Error(`unknown time direction ${JSON.stringify(timeDirection)}`);
}

/** Chronological time step a ribbon shows before any reordering. */
export function timeOf(n: number, timeDirection: string, ribbon: number): number {
  return timeDirection === 'inner-earliest' ? n - 1 - ribbon : ribbon;
}

export function wrapAssignment(assignment: number[], k: number): number[] {
  const n = assignment.length;
  return assignment.map((t) => pyMod(t + k, n));
}

const AGGREGATES: Record<Aggregate, (xs: number[]) => number> = {
  mean: (xs) => {
    let s = 0.0;
    for (const x of xs) s += x;
    return s / xs.length;
  },
  max: (xs) => Math.max(...xs),
  min: (xs) => Math.min(...xs),
};

export function attributeAssignment(
  series: FacadeSeries[], n: number, timeDirection: string, aggregate: Aggregate,
): number[] {
  const agg = AGGREGATES[aggregate];
  const stats: number[] = [];
  for (let t = 0; t < n; t++) {
    stats.push(agg(series.map((s) => s.values[t])));
  }
  const byStat = Array.from({ length: n }, (_, t) => t)
    .sort((a, b) => stats[a] - stats[b] || a - b);
  const ribbonsInTimeOrder = Array.from({ length: n }, (_, r) => r)
    .sort((a, b) => timeOf(n, timeDirection, a) - timeOf(n, timeDirection, b));
  const assignment = new Array<number>(n);
  ribbonsInTimeOrder.forEach((r, i) => {
    assignment[r] = byStat[i];
  });
  return assignment;
}

export interface OrderContext {
  series: FacadeSeries[];
  n_ribbons: number;
  time_direction: string;
  cyclic: boolean;
}

/**
 * Assignment after applying an ordering spec to the current one.
 *
 * Specs are 'chrono', 'attribute:mean' (or max/min), and 'wrap:K'; only
 * wrapping composes with the current assignment, and only for cyclic
 * series.
 */
export function reorderAssignment(
  ctx: OrderContext, current: number[], spec: string,
): number[] {
  if (spec === 'chrono') {
    return chronoAssignment(ctx.n_ribbons, ctx.time_direction);
  }
  if (spec.startsWith('attribute:')) {
    const name = spec.slice('attribute:'.length);
    if (name !== 'mean' && name !== 'max' && name !== 'min') {
      throw new Error(`unknown attribute aggregate ${JSON.stringify(name)}`);
    }
    return attributeAssignment(ctx.series, ctx.n_ribbons, ctx.time_direction, name);
  }
  if (spec.startsWith('wrap:')) {
    if (!ctx.cyclic) {
      throw new Error('wrap ordering requires cyclic series');
    }
    const text = spec.slice('wrap:'.length).trim();
    if (!/^[+-]?\d+$/.test(text)) {
      throw new Error(`bad wrap amount in ${JSON.stringify(spec)}`);
    }
    return wrapAssignment(current, parseInt(text, 10));
  }
  throw new Error(`unknown ordering ${JSON.stringify(spec)}`);
}
