/**
 * Viewer state and its reducer.
 *
 * Every interaction is an event folded into the state by a pure
 * reducer, so the pair (lens document, event log) fully determines the
 * final state and a recorded session replays exactly. Pointer events
 * drive a three-state gesture machine (idle, angular-drag,
 * radial-drag): angular drags sweep facade selections, radial drags
 * either navigate a user-defined time axis or wrap the ribbon order,
 * and pointer-up always lands back in idle.
 */

import { makeEncoding, pyMod, valueColor, twoToneOf } from './colors.js';
import { chronoAssignment, reorderAssignment, wrapAssignment } from './order.js';
import type { OrderContext } from './order.js';
import { angularSelection, facadeWedges, lensCenter, lensDiameter, TAU } from './wedges.js';
import type { Wedge } from './wedges.js';
import type { FilterRange, LensDocument } from './types.js';

export type GesturePhase = 'idle' | 'angular-drag' | 'radial-drag';
export type RadialMode = 'navigate' | 'reorder';

export interface GestureState {
  phase: GesturePhase;
  anchor: [number, number] | null;
  startAngle: number;
  lastAngle: number;
  sweep: number;
  startRadius: number;
  baseAssignment: number[] | null;
  baseWrap: number;
  buildingAxis: boolean;
}

const IDLE_GESTURE: GestureState = {
  phase: 'idle',
  anchor: null,
  startAngle: 0,
  lastAngle: 0,
  sweep: 0,
  startRadius: 0,
  baseAssignment: null,
  baseWrap: 0,
  buildingAxis: false,
};

export interface TimeAxis {
  a: [number, number];
  b: [number, number];
}

export interface ViewerState {
  doc: LensDocument;
  wedges: Wedge[];
  assignment: number[];
  ordering: string;
  wrapShift: number;
  filter: FilterRange | null;
  legendOn: boolean[];
  selection: number[] | null;
  axis: TimeAxis | null;
  deltaT: [number, number] | null;
  radialMode: RadialMode;
  notice: string | null;
  gesture: GestureState;
}

export type ViewerEvent =
  | { kind: 'pointer-down'; x: number; y: number }
  | { kind: 'pointer-move'; x: number; y: number }
  | { kind: 'pointer-up'; x: number; y: number }
  | { kind: 'set-ordering'; spec: string }
  | { kind: 'set-radial-mode'; mode: RadialMode }
  | { kind: 'toggle-legend'; segment: number }
  | { kind: 'set-filter'; filter: FilterRange | null }
  | { kind: 'clear-selection' }
  | { kind: 'clear-axis' };

// Saturation factor applied outside the range spanned by the legend
// segments that are still on.
export const LEGEND_P = 0.25;

// Displacement (as a fraction of the lens diameter) before a press
// commits to an angular or radial drag.
const CLASSIFY_EPS = 0.005;

// Presses this far outside the lens bounds still start a gesture.
const BOUNDS_PAD = 0.05;

function legendFromFilter(doc: LensDocument, filter: FilterRange | null): boolean[] {
  const n = doc.palette.length;
  if (filter === null) {
    return new Array<boolean>(n).fill(true);
  }
  const { vmin, vmax } = doc.normalization;
  const w = (vmax - vmin) / n;
  return Array.from({ length: n }, (_, i) => {
    const mid = vmin + (i + 0.5) * w;
    return filter.lo <= mid && mid <= filter.hi;
  });
}

/**
 * Filter range spanned by the legend segments that are on.
 *
 * The legend splits [vmin, vmax] into one equal bin per palette stop.
 * All segments on means no filter; interior gaps are absorbed into the
 * tightest containing range, which is what a single lo:hi window can
 * express.
 */
export function legendFilter(doc: LensDocument, legendOn: boolean[]): FilterRange | null {
  const n = doc.palette.length;
  const { vmin, vmax } = doc.normalization;
  if (legendOn.every((on) => on)) {
    return null;
  }
  const firstOn = legendOn.indexOf(true);
  if (firstOn === -1) {
    const below = vmin - Math.max(1, vmax - vmin);
    return { lo: below, hi: below, p: LEGEND_P };
  }
  const lastOn = legendOn.lastIndexOf(true);
  const w = (vmax - vmin) / n;
  const lo = firstOn === 0 ? vmin : vmin + firstOn * w;
  const hi = lastOn === n - 1 ? vmax : vmin + (lastOn + 1) * w;
  return { lo, hi, p: LEGEND_P };
}

function orderContext(doc: LensDocument): OrderContext {
  return {
    series: doc.series,
    n_ribbons: doc.n_ribbons,
    time_direction: doc.time_direction,
    cyclic: doc.cyclic,
  };
}

function sameAssignment(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((t, i) => t === b[i]);
}

/**
 * Recover (ordering, wrapShift) from a document's assignment.
 *
 * Documents written by the CLI always come from one ordering spec, so
 * trying chrono, the wraps of chrono, and the three aggregates covers
 * them; anything else is kept verbatim and labeled custom.
 */
function detectOrdering(doc: LensDocument): { ordering: string; wrapShift: number } {
  const ctx = orderContext(doc);
  const n = doc.n_ribbons;
  const chrono = chronoAssignment(n, doc.time_direction);
  if (sameAssignment(doc.assignment, chrono)) {
    return { ordering: 'chrono', wrapShift: 0 };
  }
  if (doc.cyclic) {
    for (let k = 1; k < n; k++) {
      if (sameAssignment(doc.assignment, wrapAssignment(chrono, k))) {
        return { ordering: 'chrono', wrapShift: k };
      }
    }
  }
  for (const agg of ['mean', 'max', 'min']) {
    const spec = `attribute:${agg}`;
    if (sameAssignment(doc.assignment, reorderAssignment(ctx, chrono, spec))) {
      return { ordering: spec, wrapShift: 0 };
    }
  }
  return { ordering: 'custom', wrapShift: 0 };
}

export function initialState(doc: LensDocument): ViewerState {
  const { ordering, wrapShift } = detectOrdering(doc);
  return {
    doc,
    wedges: facadeWedges(doc),
    assignment: doc.assignment.slice(),
    ordering,
    wrapShift,
    filter: doc.filter,
    legendOn: legendFromFilter(doc, doc.filter),
    selection: null,
    axis: null,
    deltaT: null,
    radialMode: 'navigate',
    notice: null,
    gesture: IDLE_GESTURE,
  };
}

/** Mean spacing of the ribbon boundary distances. */
export function ribbonThickness(doc: LensDocument): number {
  const L = doc.levels;
  if (L.length > 1) {
    return (L[L.length - 1] - L[0]) / (L.length - 1);
  }
  if (L.length === 1 && L[0] > 0) {
    return L[0];
  }
  return lensDiameter(doc) / (2 * doc.n_ribbons);
}

/** Continuous time index of a point projected onto the axis, clamped. */
export function timeIndexAt(axis: TimeAxis, p: [number, number], nRibbons: number): number {
  const dx = axis.b[0] - axis.a[0];
  const dy = axis.b[1] - axis.a[1];
  const l2 = dx * dx + dy * dy;
  if (l2 === 0) {
    return 0;
  }
  const u = ((p[0] - axis.a[0]) * dx + (p[1] - axis.a[1]) * dy) / l2;
  return Math.min(Math.max(u, 0), 1) * (nRibbons - 1);
}

function wrapToPi(angle: number): number {
  return pyMod(angle + Math.PI, TAU) - Math.PI;
}

function insideLens(doc: LensDocument, x: number, y: number): boolean {
  const [x0, y0, x1, y1] = doc.bounds;
  const pad = BOUNDS_PAD * lensDiameter(doc);
  return x >= x0 - pad && x <= x1 + pad && y >= y0 - pad && y <= y1 + pad;
}

function applySpec(state: ViewerState, spec: string): ViewerState {
  const ctx = orderContext(state.doc);
  const chrono = chronoAssignment(ctx.n_ribbons, ctx.time_direction);
  let assignment: number[];
  try {
    assignment = reorderAssignment(ctx, chrono, spec);
  } catch (err) {
    return { ...state, notice: (err as Error).message };
  }
  if (spec.startsWith('wrap:')) {
    const k = pyMod(parseInt(spec.slice('wrap:'.length), 10), ctx.n_ribbons);
    return { ...state, assignment, ordering: 'chrono', wrapShift: k, notice: null };
  }
  return { ...state, assignment, ordering: spec, wrapShift: 0, notice: null };
}

function reduceWrapDrag(state: ViewerState, radius: number): ViewerState {
  const g = state.gesture;
  const n = state.doc.n_ribbons;
  const k = Math.round((radius - g.startRadius) / ribbonThickness(state.doc));
  return {
    ...state,
    assignment: wrapAssignment(g.baseAssignment!, k),
    wrapShift: pyMod(g.baseWrap + k, n),
  };
}

function reducePointerDown(state: ViewerState, x: number, y: number): ViewerState {
  if (!insideLens(state.doc, x, y)) {
    return { ...state, gesture: IDLE_GESTURE };
  }
  return { ...state, gesture: { ...IDLE_GESTURE, anchor: [x, y] } };
}

function classifyDrag(state: ViewerState, x: number, y: number): ViewerState {
  const g = state.gesture;
  const [ax, ay] = g.anchor!;
  const dx = x - ax;
  const dy = y - ay;
  if (Math.hypot(dx, dy) < CLASSIFY_EPS * lensDiameter(state.doc)) {
    return state;
  }
  const [cx, cy] = lensCenter(state.doc);
  const r0 = Math.hypot(ax - cx, ay - cy);
  const [rx, ry] = r0 === 0
    ? [dx / Math.hypot(dx, dy), dy / Math.hypot(dx, dy)]
    : [(ax - cx) / r0, (ay - cy) / r0];
  const along = Math.abs(dx * rx + dy * ry);
  const across = Math.abs(rx * dy - ry * dx);
  if (along >= across) {
    const gesture: GestureState = {
      ...g, phase: 'radial-drag', startRadius: r0,
      baseAssignment: state.radialMode === 'reorder' ? state.assignment : null,
      baseWrap: state.wrapShift,
      buildingAxis: state.radialMode === 'navigate' && state.axis === null,
    };
    const next = { ...state, gesture };
    return reduceRadialMove(next, x, y);
  }
  const startAngle = Math.atan2(ay - cy, ax - cx);
  const angle = Math.atan2(y - cy, x - cx);
  const gesture: GestureState = {
    ...g, phase: 'angular-drag', startAngle, lastAngle: angle,
    sweep: wrapToPi(angle - startAngle), startRadius: r0,
  };
  return reduceAngularSelection({ ...state, gesture }, x, y);
}

function reduceAngularMove(state: ViewerState, x: number, y: number): ViewerState {
  const g = state.gesture;
  const [cx, cy] = lensCenter(state.doc);
  const angle = Math.atan2(y - cy, x - cx);
  const gesture: GestureState = {
    ...g, sweep: g.sweep + wrapToPi(angle - g.lastAngle), lastAngle: angle,
  };
  return reduceAngularSelection({ ...state, gesture }, x, y);
}

function reduceAngularSelection(state: ViewerState, x: number, y: number): ViewerState {
  const g = state.gesture;
  const [cx, cy] = lensCenter(state.doc);
  const selection = angularSelection(
    state.doc, state.wedges, g.startAngle, g.sweep,
    g.startRadius, Math.hypot(x - cx, y - cy));
  return { ...state, selection };
}

function reduceRadialMove(state: ViewerState, x: number, y: number): ViewerState {
  const g = state.gesture;
  if (g.buildingAxis) {
    return { ...state, axis: { a: g.anchor!, b: [x, y] } };
  }
  if (g.baseAssignment !== null) {
    const [cx, cy] = lensCenter(state.doc);
    return reduceWrapDrag(state, Math.hypot(x - cx, y - cy));
  }
  if (state.axis !== null) {
    const n = state.doc.n_ribbons;
    const t0 = timeIndexAt(state.axis, g.anchor!, n);
    const t1 = timeIndexAt(state.axis, [x, y], n);
    return { ...state, deltaT: [Math.min(t0, t1), Math.max(t0, t1)] };
  }
  return state;
}

function reducePointerUp(state: ViewerState, x: number, y: number): ViewerState {
  const g = state.gesture;
  let next = state;
  if (g.phase === 'angular-drag') {
    next = reduceAngularSelection(state, x, y);
  } else if (g.phase === 'radial-drag') {
    next = reduceRadialMove(state, x, y);
    if (g.buildingAxis && next.axis !== null) {
      const [ax, ay] = next.axis.a;
      const [bx, by] = next.axis.b;
      if (Math.hypot(bx - ax, by - ay) < CLASSIFY_EPS * lensDiameter(state.doc)) {
        next = { ...next, axis: null };
      }
    }
  }
  return { ...next, gesture: IDLE_GESTURE };
}

export function reduce(state: ViewerState, event: ViewerEvent): ViewerState {
  switch (event.kind) {
    case 'pointer-down':
      return reducePointerDown(state, event.x, event.y);
    case 'pointer-move': {
      const g = state.gesture;
      if (g.phase === 'idle') {
        return g.anchor === null ? state : classifyDrag(state, event.x, event.y);
      }
      if (g.phase === 'angular-drag') {
        return reduceAngularMove(state, event.x, event.y);
      }
      return reduceRadialMove(state, event.x, event.y);
    }
    case 'pointer-up':
      return reducePointerUp(state, event.x, event.y);
    case 'set-ordering':
      return applySpec(state, event.spec);
    case 'set-radial-mode':
      if (event.mode === 'reorder' && !state.doc.cyclic) {
        return { ...state, notice: 'wrapped reordering needs a cyclic series' };
      }
      return { ...state, radialMode: event.mode, notice: null };
    case 'toggle-legend': {
      if (event.segment < 0 || event.segment >= state.legendOn.length) {
        return state;
      }
      const legendOn = state.legendOn.slice();
      legendOn[event.segment] = !legendOn[event.segment];
      return { ...state, legendOn, filter: legendFilter(state.doc, legendOn), notice: null };
    }
    case 'set-filter': {
      const f = event.filter;
      if (f !== null && (f.hi < f.lo || f.p < 0 || f.p > 1)) {
        return { ...state, notice: 'filter range is inverted or p outside [0, 1]' };
      }
      return {
        ...state, filter: f,
        legendOn: legendFromFilter(state.doc, f), notice: null,
      };
    }
    case 'clear-selection':
      return { ...state, selection: null };
    case 'clear-axis':
      return { ...state, axis: null, deltaT: null };
  }
}

function seriesValues(state: ViewerState, facade: number): number[] {
  const entry = state.doc.series.find((s) => s.facade === facade);
  if (entry === undefined) {
    throw new Error(`no series for facade ${facade}`);
  }
  return entry.values;
}

export function valueAt(state: ViewerState, ribbon: number, facade: number): number {
  return seriesValues(state, facade)[state.assignment[ribbon]];
}

function encoding(state: ViewerState) {
  const { vmin, vmax } = state.doc.normalization;
  return makeEncoding(state.doc.palette, vmin, vmax, state.filter);
}

/** Flat hex color of a cell under the current viewer state. */
export function cellColorOf(state: ViewerState, ribbon: number, facade: number): string {
  return valueColor(encoding(state), valueAt(state, ribbon, facade));
}

/** Two-tone stop colors and split fraction of a cell. */
export function twoTonePartsOf(
  state: ViewerState, ribbon: number, facade: number,
): [string, string, number] {
  return twoToneOf(encoding(state), valueAt(state, ribbon, facade));
}

function pointInRing(ring: number[][], x: number, y: number): boolean {
  let inside = false;
  for (let i = 0, j = ring.length - 1; i < ring.length; j = i++) {
    const [xi, yi] = ring[i];
    const [xj, yj] = ring[j];
    if (yi > y !== yj > y && x < ((xj - xi) * (y - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

export interface HitResult {
  ribbon: number;
  facade: number;
  value: number;
}

/** Cell under a point, with its raw (unfiltered) value. */
export function hitTest(state: ViewerState, x: number, y: number): HitResult | null {
  for (const cell of state.doc.cells) {
    for (const part of cell.parts) {
      if (pointInRing(part.polygon, x, y)) {
        return {
          ribbon: cell.ribbon,
          facade: cell.facade,
          value: valueAt(state, cell.ribbon, cell.facade),
        };
      }
    }
  }
  return null;
}

export interface StateFlags {
  order: string | null;
  filter: string | null;
}

/**
 * Current state as CLI-compatible --order/--filter values.
 *
 * A wrap shift is only expressible as a flag on top of chronological
 * order; combinations the CLI cannot reproduce with a single spec
 * export order as null.
 */
export function exportStateFlags(state: ViewerState): StateFlags {
  let order: string | null;
  if (state.wrapShift !== 0) {
    order = state.ordering === 'chrono' ? `wrap:${state.wrapShift}` : null;
  } else {
    order = state.ordering === 'custom' ? null : state.ordering;
  }
  const filter = state.filter === null
    ? null
    : `${state.filter.lo}:${state.filter.hi}:${state.filter.p}`;
  return { order, filter };
}
