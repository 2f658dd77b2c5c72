/**
 * Canvas drawing of a lens under a viewer state.
 *
 * Geometry stays in the document's world coordinates and is mapped
 * through a y-up viewport. Colors are recomputed from the state, so the
 * drawing always reflects the current ordering and filter; when the
 * state still matches the document's exported encoding, the document's
 * pre-split two-tone parts are drawn verbatim.
 */

import { cellColorOf } from './state.js';
import type { ViewerState } from './state.js';
import type { LensDocument } from './types.js';

export const LEGEND_HEIGHT = 56;
const MARGIN = 24;
const DIM_ALPHA = 0.25;

export interface Viewport {
  scale: number;
  ox: number;
  oyTop: number;
  ymax: number;
}

export function fitViewport(doc: LensDocument, width: number, height: number): Viewport {
  const [x0, y0, x1, y1] = doc.bounds;
  const bw = x1 - x0;
  const bh = y1 - y0;
  const scale = Math.min(
    (width - 2 * MARGIN) / bw,
    (height - LEGEND_HEIGHT - 2 * MARGIN) / bh);
  return {
    scale,
    ox: (width - bw * scale) / 2 - x0 * scale,
    oyTop: (height - LEGEND_HEIGHT - bh * scale) / 2,
    ymax: y1,
  };
}

export function toScreen(vp: Viewport, x: number, y: number): [number, number] {
  return [vp.ox + x * vp.scale, vp.oyTop + (vp.ymax - y) * vp.scale];
}

export function toWorld(vp: Viewport, sx: number, sy: number): [number, number] {
  return [(sx - vp.ox) / vp.scale, vp.ymax - (sy - vp.oyTop) / vp.scale];
}

export interface LegendRect {
  segment: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

export function legendRects(state: ViewerState, width: number, height: number): LegendRect[] {
  const n = state.doc.palette.length;
  const barWidth = Math.min(width - 2 * MARGIN, 420);
  const x0 = (width - barWidth) / 2;
  const y = height - LEGEND_HEIGHT + 8;
  const w = barWidth / n;
  return Array.from({ length: n }, (_, i) => ({
    segment: i, x: x0 + i * w, y, w, h: 18,
  }));
}

function tracePath(ctx: CanvasRenderingContext2D, vp: Viewport, ring: number[][]): void {
  ctx.beginPath();
  ring.forEach(([x, y], i) => {
    const [sx, sy] = toScreen(vp, x, y);
    if (i === 0) {
      ctx.moveTo(sx, sy);
    } else {
      ctx.lineTo(sx, sy);
    }
  });
  ctx.closePath();
}

function sameEncoding(state: ViewerState): boolean {
  const doc = state.doc;
  const assignEq = state.assignment.every((t, r) => t === doc.assignment[r]);
  const a = state.filter;
  const b = doc.filter;
  const filterEq = a === null || b === null
    ? a === b
    : a.lo === b.lo && a.hi === b.hi && a.p === b.p;
  return assignEq && filterEq;
}

function format6(x: number): string {
  return String(parseFloat(x.toPrecision(6)));
}

function drawCells(ctx: CanvasRenderingContext2D, state: ViewerState, vp: Viewport): void {
  const verbatim = sameEncoding(state);
  for (const cell of state.doc.cells) {
    const dimmed = state.selection !== null && !state.selection.includes(cell.facade);
    ctx.globalAlpha = dimmed ? DIM_ALPHA : 1;
    if (verbatim) {
      for (const part of cell.parts) {
        tracePath(ctx, vp, part.polygon);
        ctx.fillStyle = part.color;
        ctx.fill();
      }
    } else {
      // Two-tone split geometry only exists in the document; live
      // re-encodings fall back to one flat color per cell.
      const color = cellColorOf(state, cell.ribbon, cell.facade);
      for (const part of cell.parts) {
        tracePath(ctx, vp, part.polygon);
        ctx.fillStyle = color;
        ctx.fill();
      }
    }
  }
  ctx.globalAlpha = 1;
}

function drawOutlines(ctx: CanvasRenderingContext2D, state: ViewerState, vp: Viewport): void {
  ctx.strokeStyle = '#333333';
  ctx.lineWidth = 1.5;
  tracePath(ctx, vp, state.doc.footprint);
  ctx.stroke();
  ctx.lineWidth = 1;
  for (const loop of state.doc.core) {
    tracePath(ctx, vp, loop);
    ctx.stroke();
  }
}

function drawGlyphs(ctx: CanvasRenderingContext2D, state: ViewerState, vp: Viewport): void {
  const size = 4;
  ctx.fillStyle = '#222222';
  for (const glyph of state.doc.glyphs) {
    const [sx, sy] = toScreen(vp, glyph.at[0], glyph.at[1]);
    const dx = glyph.dir[0];
    const dy = -glyph.dir[1];
    ctx.beginPath();
    ctx.moveTo(sx + 2 * size * dx, sy + 2 * size * dy);
    ctx.lineTo(sx - size * dy, sy + size * dx);
    ctx.lineTo(sx + size * dy, sy - size * dx);
    ctx.closePath();
    ctx.fill();
  }
}

function drawAxis(ctx: CanvasRenderingContext2D, state: ViewerState, vp: Viewport): void {
  if (state.axis === null) {
    return;
  }
  const [ax, ay] = toScreen(vp, state.axis.a[0], state.axis.a[1]);
  const [bx, by] = toScreen(vp, state.axis.b[0], state.axis.b[1]);
  ctx.strokeStyle = '#b04a00';
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(bx, by);
  ctx.stroke();
  if (state.deltaT !== null) {
    const n = state.doc.n_ribbons;
    const [t0, t1] = state.deltaT;
    const u0 = n > 1 ? t0 / (n - 1) : 0;
    const u1 = n > 1 ? t1 / (n - 1) : 0;
    ctx.lineWidth = 6;
    ctx.beginPath();
    ctx.moveTo(ax + (bx - ax) * u0, ay + (by - ay) * u0);
    ctx.lineTo(ax + (bx - ax) * u1, ay + (by - ay) * u1);
    ctx.stroke();
  }
  ctx.lineWidth = 1;
}

function drawLegend(
  ctx: CanvasRenderingContext2D, state: ViewerState,
  width: number, height: number,
): void {
  const rects = legendRects(state, width, height);
  state.doc.palette.forEach((color, i) => {
    const r = rects[i];
    ctx.globalAlpha = state.legendOn[i] ? 1 : 0.15;
    ctx.fillStyle = color;
    ctx.fillRect(r.x, r.y, r.w, r.h);
    ctx.globalAlpha = 1;
    ctx.strokeStyle = '#999999';
    ctx.strokeRect(r.x, r.y, r.w, r.h);
  });
  const first = rects[0];
  const last = rects[rects.length - 1];
  ctx.fillStyle = '#222222';
  ctx.font = '12px sans-serif';
  ctx.textAlign = 'left';
  ctx.fillText(format6(state.doc.normalization.vmin), first.x, first.y + 32);
  ctx.textAlign = 'right';
  ctx.fillText(format6(state.doc.normalization.vmax), last.x + last.w, last.y + 32);
  ctx.textAlign = 'left';
}

export function drawScene(
  ctx: CanvasRenderingContext2D, state: ViewerState,
  width: number, height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const vp = fitViewport(state.doc, width, height);
  drawCells(ctx, state, vp);
  drawOutlines(ctx, state, vp);
  drawGlyphs(ctx, state, vp);
  drawAxis(ctx, state, vp);
  drawLegend(ctx, state, width, height);
  if (state.notice !== null) {
    ctx.fillStyle = '#8a1f1f';
    ctx.font = '13px sans-serif';
    ctx.fillText(state.notice, MARGIN, 18);
  }
}
