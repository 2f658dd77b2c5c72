/**
 * Angular geometry for facade selection.
 *
 * Each facade occupies a wedge of directions around the lens center,
 * measured from its cell polygons. An angular drag sweeps an arc; the
 * facades whose wedges intersect the swept arc become the selection.
 * Arc endpoints snap to a granularity that coarsens toward the center
 * (step = 1 degree at the rim, scaled by rim/radius), so short central
 * gestures act on whole wedges while rim gestures are precise.
 */

import { pyMod } from './colors.js';
import type { LensDocument } from './types.js';

export const TAU = 2 * Math.PI;

export interface Wedge {
  facade: number;
  start: number;
  span: number;
}

export function lensCenter(doc: LensDocument): [number, number] {
  const [x0, y0, x1, y1] = doc.bounds;
  return [(x0 + x1) / 2, (y0 + y1) / 2];
}

export function lensDiameter(doc: LensDocument): number {
  const [x0, y0, x1, y1] = doc.bounds;
  return Math.hypot(x1 - x0, y1 - y0);
}

/** Minimal circular interval covering a set of angles. */
function angleHull(angles: number[]): { start: number; span: number } {
  const sorted = [...angles].sort((a, b) => a - b);
  let gapIndex = 0;
  let gapSize = -1;
  for (let i = 0; i < sorted.length; i++) {
    const next = sorted[(i + 1) % sorted.length];
    const gap = pyMod(next - sorted[i], TAU);
    if (gap > gapSize) {
      gapSize = gap;
      gapIndex = i;
    }
  }
  return {
    start: sorted[(gapIndex + 1) % sorted.length],
    span: sorted.length === 1 ? 0 : TAU - gapSize,
  };
}

export function facadeWedges(doc: LensDocument): Wedge[] {
  const [cx, cy] = lensCenter(doc);
  const byFacade = new Map<number, number[]>();
  for (const cell of doc.cells) {
    let angles = byFacade.get(cell.facade);
    if (angles === undefined) {
      angles = [];
      byFacade.set(cell.facade, angles);
    }
    for (const part of cell.parts) {
      for (const [x, y] of part.polygon) {
        angles.push(Math.atan2(y - cy, x - cx));
      }
    }
  }
  const wedges: Wedge[] = [];
  for (const facade of [...byFacade.keys()].sort((a, b) => a - b)) {
    const hull = angleHull(byFacade.get(facade)!);
    wedges.push({ facade, start: hull.start, span: hull.span });
  }
  return wedges;
}

/** Circular intervals [a1, a1+s1] and [a2, a2+s2] share a point. */
export function arcsIntersect(a1: number, s1: number, a2: number, s2: number): boolean {
  const d = pyMod(a2 - a1, TAU);
  return d <= s1 || d + s2 >= TAU;
}

const SNAP_AT_RIM = Math.PI / 180;

export function snapGranularity(radius: number, diameter: number): number {
  const rim = diameter / 2;
  const step = SNAP_AT_RIM * (rim / Math.max(radius, 1e-12));
  return Math.min(Math.max(step, SNAP_AT_RIM / 4), Math.PI / 4);
}

/**
 * Facades whose wedges intersect a swept arc.
 *
 * The arc starts at startAngle and extends by the signed sweep; the
 * start snaps at the press radius, the sweep at the release radius. A
 * sweep of a full turn or more selects every facade.
 */
export function angularSelection(
  doc: LensDocument, wedges: Wedge[],
  startAngle: number, sweep: number,
  startRadius: number, endRadius: number,
): number[] {
  const diameter = lensDiameter(doc);
  const g0 = snapGranularity(startRadius, diameter);
  const g1 = snapGranularity(endRadius, diameter);
  const a = Math.round(startAngle / g0) * g0;
  const span = Math.round(sweep / g1) * g1;
  if (Math.abs(span) >= TAU) {
    return wedges.map((w) => w.facade);
  }
  const lo = span >= 0 ? a : a + span;
  const s = Math.abs(span);
  return wedges
    .filter((w) => arcsIntersect(lo, s, w.start, w.span))
    .map((w) => w.facade);
}
