/**
 * Value-to-color math, kept bit-compatible with the renderer.
 *
 * Every operation mirrors the Python encoding in IEEE-754 double
 * arithmetic with the same operation order, so a recolored cell matches
 * the renderer's SVG byte for byte: min-max normalization, piecewise
 * linear palette interpolation, HSV desaturation outside the filter
 * range, and floor(x * 255 + 0.5) channel quantization.
 */

import type { FilterRange } from './types.js';

export type RGB = [number, number, number];

/** Encoding state a color depends on; geometry-free. */
export interface Encoding {
  stops: RGB[];
  vmin: number;
  vmax: number;
  filter: FilterRange | null;
}

export function hexToRgb(hex: string): RGB {
  return [
    parseInt(hex.slice(1, 3), 16) / 255,
    parseInt(hex.slice(3, 5), 16) / 255,
    parseInt(hex.slice(5, 7), 16) / 255,
  ];
}

function quantize(c: number): number {
  const clipped = Math.min(Math.max(c, 0), 1);
  return Math.floor(clipped * 255.0 + 0.5);
}

export function rgbToHex(rgb: RGB): string {
  const hex2 = (c: number) => quantize(c).toString(16).padStart(2, '0');
  return `#${hex2(rgb[0])}${hex2(rgb[1])}${hex2(rgb[2])}`;
}

export function pyMod(a: number, n: number): number {
  return ((a % n) + n) % n;
}

export function rgbToHsv(rgb: RGB): RGB {
  const [r, g, b] = rgb;
  const mx = Math.max(r, g, b);
  const mn = Math.min(r, g, b);
  const d = mx - mn;
  let h: number;
  if (d === 0) {
    h = 0.0;
  } else if (mx === r) {
    h = pyMod((g - b) / d, 6.0);
  } else if (mx === g) {
    h = (b - r) / d + 2.0;
  } else {
    h = (r - g) / d + 4.0;
  }
  h /= 6.0;
  const s = mx === 0 ? 0.0 : d / mx;
  return [h, s, mx];
}

export function hsvToRgb(hsv: RGB): RGB {
  const [h, s, v] = hsv;
  const i = Math.floor(h * 6.0) % 6;
  const f = h * 6.0 - Math.floor(h * 6.0);
  const p = v * (1.0 - s);
  const q = v * (1.0 - f * s);
  const t = v * (1.0 - (1.0 - f) * s);
  const table: RGB[] = [
    [v, t, p], [q, v, p], [p, v, t],
    [p, q, v], [t, p, v], [v, p, q],
  ];
  return table[i];
}

export function makeEncoding(
  palette: string[], vmin: number, vmax: number, filter: FilterRange | null,
): Encoding {
  return { stops: palette.map(hexToRgb), vmin, vmax, filter };
}

export function normalizedValue(enc: Encoding, value: number): number {
  if (enc.vmax === enc.vmin) {
    return 0.5;
  }
  return (value - enc.vmin) / (enc.vmax - enc.vmin);
}

export function paletteRgb(enc: Encoding, v: number): RGB {
  const x = Math.min(Math.max(v, 0), 1) * (enc.stops.length - 1);
  const j = Math.min(Math.floor(x), enc.stops.length - 2);
  const f = x - j;
  const a = enc.stops[j];
  const b = enc.stops[j + 1];
  return [
    a[0] * (1.0 - f) + b[0] * f,
    a[1] * (1.0 - f) + b[1] * f,
    a[2] * (1.0 - f) + b[2] * f,
  ];
}

function applyFilter(enc: Encoding, raw: number, rgb: RGB): RGB {
  if (enc.filter === null) {
    return rgb;
  }
  const { lo, hi, p } = enc.filter;
  // p = 1 must be the exact identity, not an HSV round trip.
  if (p === 1.0 || (lo <= raw && raw <= hi)) {
    return rgb;
  }
  const [h, s, v] = rgbToHsv(rgb);
  return hsvToRgb([h, s * p, v]);
}

/** Flat hex color of a raw value under the encoding. */
export function valueColor(enc: Encoding, raw: number): string {
  const rgb = paletteRgb(enc, normalizedValue(enc, raw));
  return rgbToHex(applyFilter(enc, raw, rgb));
}

/**
 * Palette bin split of a raw value: the bin's two stop colors and the
 * in-bin fraction claimed by the higher stop.
 */
export function twoToneOf(enc: Encoding, raw: number): [string, string, number] {
  const x = Math.min(Math.max(normalizedValue(enc, raw), 0), 1) * (enc.stops.length - 1);
  const j = Math.min(Math.floor(x), enc.stops.length - 2);
  const f = x - j;
  const lo = rgbToHex(applyFilter(enc, raw, enc.stops[j]));
  const hi = rgbToHex(applyFilter(enc, raw, enc.stops[j + 1]));
  return [lo, hi, f];
}
