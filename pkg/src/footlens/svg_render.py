"""Deterministic SVG rendering of encoded lenses.

Output is assembled by plain string formatting with fixed element order and
4-decimal coordinates, so identical inputs produce byte-identical files.
World coordinates are y-up; the renderer mirrors y into SVG's y-down frame.
"""

import numpy as np


def _fmt(x):
    if abs(x) < 5e-5:
        x = 0.0
    return "%.4f" % x


def _num(x):
    return "%.6g" % x


class _Frame:
    def __init__(self, bounds, margin):
        self.minx, self.miny, self.maxx, self.maxy = bounds
        self.margin = margin

    def pt(self, p):
        return (float(p[0]), float(self.maxy + self.miny - p[1]))

    def viewbox(self):
        m = self.margin
        return (self.minx - m, self.miny - m,
                self.maxx - self.minx + 2 * m,
                self.maxy - self.miny + 2 * m)


def _path(frame, ring, close=True):
    parts = []
    for i, p in enumerate(ring):
        x, y = frame.pt(p)
        parts.append(("M" if i == 0 else "L") + _fmt(x) + " " + _fmt(y))
    if close:
        parts.append("Z")
    return "".join(parts)


def render_svg(lens, draw_glyphs=True):
    """The lens as a standalone SVG document string."""
    from .encoding import PALETTE, cell_parts, glyphs

    layout = lens.layout
    fp = layout.footprint.vertices
    diam = layout.footprint.diameter()
    bounds = (fp[:, 0].min(), fp[:, 1].min(), fp[:, 0].max(), fp[:, 1].max())
    frame = _Frame(bounds, margin=0.04 * diam)
    vx, vy, vw, vh = frame.viewbox()
    # Extra strip below the drawing for the palette legend.
    band = 0.07 * diam
    vh += band
    thin = 0.002 * diam

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="%s %s %s %s">'
        % (_fmt(vx), _fmt(vy), _fmt(vw), _fmt(vh)),
        '<path d="%s" fill="#ffffff" stroke="#222222" stroke-width="%s"/>'
        % (_path(frame, fp), _fmt(2 * thin)),
    ]

    for cell in sorted(layout.cells, key=lambda c: (c.ribbon, c.facade)):
        for ring, color in cell_parts(lens, cell):
            lines.append(
                '<path d="%s" fill="%s" stroke="#ffffff" '
                'stroke-width="%s"/>' % (_path(frame, ring), color,
                                         _fmt(thin)))

    for loop in layout.core:
        lines.append(
            '<path d="%s" fill="#ffffff" stroke="#888888" '
            'stroke-width="%s"/>' % (_path(frame, loop), _fmt(thin)))

    # Legend: palette swatches spanning the footprint width, min/max labels.
    sw = (bounds[2] - bounds[0]) / len(PALETTE)
    sy = bounds[3] + frame.margin + 0.15 * band
    for i, color in enumerate(PALETTE):
        lines.append('<rect x="%s" y="%s" width="%s" height="%s" fill="%s"/>'
                     % (_fmt(bounds[0] + i * sw), _fmt(sy), _fmt(sw),
                        _fmt(0.45 * band), color))
    ty = sy + 0.77 * band
    lines.append('<text x="%s" y="%s" font-size="%s" fill="#222222">%s'
                 '</text>' % (_fmt(bounds[0]), _fmt(ty), _fmt(0.32 * band),
                              _num(lens.vmin)))
    lines.append('<text x="%s" y="%s" font-size="%s" fill="#222222" '
                 'text-anchor="end">%s</text>'
                 % (_fmt(bounds[2]), _fmt(ty), _fmt(0.32 * band),
                    _num(lens.vmax)))

    for g in glyphs(lens) if draw_glyphs else []:
        at = np.asarray(g["at"])
        d = np.asarray(g["dir"])
        perp = np.array([-d[1], d[0]])
        size = 0.018 * diam
        apex = at + d * size
        b1 = at - d * 0.4 * size + perp * 0.5 * size
        b2 = at - d * 0.4 * size - perp * 0.5 * size
        tri = np.vstack([apex, b1, b2])
        lines.append('<path d="%s" fill="#111111"/>' % _path(frame, tri))

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
