"""Binding facade time series onto ribbon cells.

Each ribbon displays one time step of every facade's series; a cell's color
encodes the bound value through a seven-stop palette after lens-wide
min-max normalization. Ribbon-to-time assignments are permutations: the
chronological layout places the earliest step on the innermost ribbon by
default, attribute orderings sort steps by an aggregate, and cyclic series
admit rotations. Re-encodings never mutate a lens; they return a new one.
"""

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BindingError, InputError
from .ribbons import sector_curves

PALETTE = ["#440154", "#443983", "#31688e", "#21918c", "#35b779",
           "#90d743", "#fde725"]

_STOPS = np.array([[int(h[1:3], 16), int(h[3:5], 16), int(h[5:7], 16)]
                   for h in PALETTE], dtype=float) / 255.0


@dataclass(frozen=True)
class TemporalSeries:
    """One facade's attribute across the sampled time steps."""
    facade_id: int
    values: np.ndarray
    cyclic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.shape[0] == 0:
            raise InputError(f"facade {self.facade_id}: series must be a "
                             "non-empty vector")


@dataclass(frozen=True)
class EncodedLens:
    """A layout with series bound to its cells under one ordering."""
    layout: object
    series: dict
    assignment: tuple
    vmin: float
    vmax: float
    time_direction: str = "inner-earliest"
    two_tone: bool = False
    filter_range: tuple = None
    cyclic: bool = False

    @property
    def n_ribbons(self):
        return len(self.assignment)

    def time_of(self, ribbon):
        """Chronological time step a ribbon would show before reordering."""
        if self.time_direction == "inner-earliest":
            return self.n_ribbons - 1 - ribbon
        return ribbon

    def value_at(self, ribbon, facade):
        return float(self.series[facade].values[self.assignment[ribbon]])


def _chrono_assignment(n, time_direction):
    if time_direction == "inner-earliest":
        return tuple(n - 1 - r for r in range(n))
    if time_direction == "outer-earliest":
        return tuple(range(n))
    raise InputError(f"unknown time direction {time_direction!r}")


def bind_series(layout, series, time_direction="inner-earliest",
                two_tone=False):
    """Attach facade series to a layout chronologically.

    Parameters
    ----------
    layout : RibbonLayout
    series : sequence of TemporalSeries
        Exactly one per facade present in the layout's cells; every series
        must have one value per ribbon and share the cyclic flag.
    time_direction : str
        'inner-earliest' (default) or 'outer-earliest'.
    two_tone : bool
        Render fractional palette positions as split cells.

    Returns
    -------
    EncodedLens

    Raises
    ------
    BindingError
        On facade mismatches or length disagreements.
    """
    need = sorted({c.facade for c in layout.cells})
    have = sorted({s.facade_id for s in series})
    if need != have:
        missing = sorted(set(need) - set(have))
        extra = sorted(set(have) - set(need))
        raise BindingError(f"facade series mismatch: missing {missing}, "
                           f"unmatched {extra}")
    if len(have) != len(series):
        raise BindingError("duplicate facade ids in series")
    n = layout.n_ribbons
    for s in series:
        if s.values.shape[0] != n:
            raise BindingError(
                f"facade {s.facade_id}: {s.values.shape[0]} samples for "
                f"{n} ribbons")
    flags = {s.cyclic for s in series}
    if len(flags) > 1:
        raise BindingError("series disagree on cyclicity")
    allv = np.concatenate([s.values for s in series])
    return EncodedLens(layout=layout,
                       series={s.facade_id: s for s in series},
                       assignment=_chrono_assignment(n, time_direction),
                       vmin=float(allv.min()), vmax=float(allv.max()),
                       time_direction=time_direction, two_tone=two_tone,
                       cyclic=flags.pop())


def reorder(lens, spec):
    """A new lens with its ribbon-to-time assignment permuted.

    ``spec`` is ``'chrono'``, ``'attribute:mean'`` (or ``max``/``min``), or
    ``'wrap:K'``. Wrapping composes with the current assignment modulo the
    ribbon count and is only defined for cyclic series.
    """
    n = lens.n_ribbons
    if spec == "chrono":
        new = _chrono_assignment(n, lens.time_direction)
    elif spec.startswith("attribute:"):
        agg_name = spec.split(":", 1)[1]
        agg = {"mean": np.mean, "max": np.max, "min": np.min}.get(agg_name)
        if agg is None:
            raise InputError(f"unknown attribute aggregate {agg_name!r}")
        table = np.array([[s.values[t] for s in lens.series.values()]
                          for t in range(n)])
        stats = [float(agg(table[t])) for t in range(n)]
        by_stat = sorted(range(n), key=lambda t: (stats[t], t))
        ribbons_in_time_order = sorted(range(n), key=lens.time_of)
        new = [0] * n
        for i, r in enumerate(ribbons_in_time_order):
            new[r] = by_stat[i]
        new = tuple(new)
    elif spec.startswith("wrap:"):
        if not lens.cyclic:
            raise InputError("wrap ordering requires cyclic series")
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad wrap amount in {spec!r}") from None
        new = tuple((t + k) % n for t in lens.assignment)
    else:
        raise InputError(f"unknown ordering {spec!r}")
    return replace(lens, assignment=new)


def filter_values(lens, lo, hi, p):
    """A new lens that desaturates values outside [lo, hi] by factor p."""
    if not (0.0 <= p <= 1.0):
        raise InputError("filter saturation factor must lie in [0, 1]")
    if hi < lo:
        raise InputError("filter range is inverted")
    return replace(lens, filter_range=(float(lo), float(hi), float(p)))


def normalized(lens, value):
    if lens.vmax == lens.vmin:
        return 0.5
    return (value - lens.vmin) / (lens.vmax - lens.vmin)


def _quantize(rgb):
    return tuple(int(c * 255.0 + 0.5) for c in np.clip(rgb, 0.0, 1.0))


def _hex(rgb):
    return "#%02x%02x%02x" % _quantize(rgb)


def rgb_to_hsv(rgb):
    r, g, b = rgb
    mx, mn = max(rgb), min(rgb)
    d = mx - mn
    if d == 0:
        h = 0.0
    elif mx == r:
        h = ((g - b) / d) % 6.0
    elif mx == g:
        h = (b - r) / d + 2.0
    else:
        h = (r - g) / d + 4.0
    h /= 6.0
    s = 0.0 if mx == 0 else d / mx
    return (h, s, mx)


def hsv_to_rgb(hsv):
    h, s, v = hsv
    i = int(h * 6.0) % 6
    f = h * 6.0 - int(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    return [(v, t, p), (q, v, p), (p, v, t),
            (p, q, v), (t, p, v), (v, p, q)][i]


def palette_rgb(v):
    """Palette color at normalized position v, as float RGB in [0, 1]."""
    x = np.clip(v, 0.0, 1.0) * (len(PALETTE) - 1)
    j = min(int(x), len(PALETTE) - 2)
    f = x - j
    return tuple(_STOPS[j] * (1.0 - f) + _STOPS[j + 1] * f)


def _apply_filter(lens, raw_value, rgb):
    if lens.filter_range is None:
        return rgb
    lo, hi, p = lens.filter_range
    # p = 1 must be the exact identity, not an HSV round trip.
    if p == 1.0 or lo <= raw_value <= hi:
        return rgb
    h, s, v = rgb_to_hsv(rgb)
    return hsv_to_rgb((h, s * p, v))


def cell_color(lens, ribbon, facade):
    """Flat hex color of one cell under the lens encoding."""
    raw = lens.value_at(ribbon, facade)
    rgb = palette_rgb(normalized(lens, raw))
    return _hex(_apply_filter(lens, raw, rgb))


def two_tone_parts(lens, ribbon, facade):
    """Palette bin split for a cell: (hex_low, hex_high, fraction).

    The fraction is how far the value sits inside its palette bin; the high
    stop claims that share of the cell's arc, growing from the arc's end.
    """
    raw = lens.value_at(ribbon, facade)
    x = np.clip(normalized(lens, raw), 0.0, 1.0) * (len(PALETTE) - 1)
    j = min(int(x), len(PALETTE) - 2)
    f = x - j
    lo = _hex(_apply_filter(lens, raw, tuple(_STOPS[j])))
    hi = _hex(_apply_filter(lens, raw, tuple(_STOPS[j + 1])))
    return lo, hi, float(f)


def _arc_point(pts, t):
    seg = np.hypot(*np.diff(pts, axis=0).T)
    total = seg.sum()
    if total == 0:
        return pts[0].copy(), 0
    target = t * total
    cum = 0.0
    for i, L in enumerate(seg):
        if cum + L >= target or i == seg.shape[0] - 1:
            u = 0.0 if L == 0 else (target - cum) / L
            return pts[i] + u * (pts[i + 1] - pts[i]), i
        cum += L
    return pts[-1].copy(), seg.shape[0] - 1


def split_cell(cell, t):
    """Split a cell radially at arc-length fraction t of both arcs.

    Returns (first_ring, second_ring) in boundary order; degenerate splits
    return the whole polygon on one side and None on the other.
    """
    if t <= 1e-9:
        return None, cell.polygon
    if t >= 1.0 - 1e-9:
        return cell.polygon, None
    po, io = _arc_point(cell.outer, t)
    pi, ii = _arc_point(cell.inner, t)
    first = np.vstack([cell.outer[:io + 1], po[None, :], pi[None, :],
                       cell.inner[:ii + 1][::-1]])
    second = np.vstack([po[None, :], cell.outer[io + 1:],
                        cell.inner[ii + 1:][::-1], pi[None, :]])
    return first, second


def cell_parts(lens, cell):
    """Render-ready (ring, hex color) pieces for one cell."""
    if not lens.two_tone:
        return [(cell.polygon, cell_color(lens, cell.ribbon, cell.facade))]
    lo, hi, f = two_tone_parts(lens, cell.ribbon, cell.facade)
    first, second = split_cell(cell, 1.0 - f)
    parts = []
    if first is not None:
        parts.append((first, lo))
    if second is not None:
        parts.append((second, hi))
    return parts


def glyphs(lens):
    """One direction marker per radial wall, at 60% of its arc length.

    Markers point toward later time: outward for inner-earliest lenses,
    inward otherwise.
    """
    out = []
    for s in sector_curves(lens.layout):
        pts = s.points
        pos, i = _arc_point(pts, 0.6)
        tangent = pts[i + 1] - pts[i]
        norm = np.hypot(*tangent)
        if norm == 0:
            continue
        tangent = tangent / norm
        # points[] runs boundary -> core, i.e. toward earlier time for the
        # inner-earliest direction.
        if lens.time_direction == "inner-earliest":
            tangent = -tangent
        out.append({"at": [float(pos[0]), float(pos[1])],
                    "dir": [float(tangent[0]), float(tangent[1])],
                    "node": s.node_id, "theta": float(s.theta)})
    return out


def export_layout(lens):
    """Viewer document: full geometry, series, and computed colors."""
    layout = lens.layout

    def ring(arr):
        return [[float(x), float(y)] for x, y in np.asarray(arr)]

    cells = []
    for c in sorted(layout.cells, key=lambda c: (c.ribbon, c.facade)):
        parts = [{"polygon": ring(r), "color": col}
                 for r, col in cell_parts(lens, c)]
        cells.append({"ribbon": int(c.ribbon), "facade": int(c.facade),
                      "value": lens.value_at(c.ribbon, c.facade),
                      "parts": parts})
    fp = layout.footprint.vertices
    doc = {
        "schema_version": 1,
        "footprint": ring(fp),
        "bounds": [float(fp[:, 0].min()), float(fp[:, 1].min()),
                   float(fp[:, 0].max()), float(fp[:, 1].max())],
        "n_ribbons": int(layout.n_ribbons),
        "levels": [float(d) for d in layout.levels],
        "time_direction": lens.time_direction,
        "assignment": list(lens.assignment),
        "palette": list(PALETTE),
        "normalization": {"vmin": lens.vmin, "vmax": lens.vmax},
        "filter": None if lens.filter_range is None else
            {"lo": lens.filter_range[0], "hi": lens.filter_range[1],
             "p": lens.filter_range[2]},
        "two_tone": bool(lens.two_tone),
        "cyclic": bool(lens.cyclic),
        "series": [{"facade": int(f), "values": [float(v) for v in
                                                 lens.series[f].values]}
                   for f in sorted(lens.series)],
        "cells": cells,
        "core": [ring(loop) for loop in layout.core],
        "sectors": [{"node": s.node_id, "points": ring(s.points)}
                    for s in sector_curves(layout)],
        "glyphs": glyphs(lens),
    }
    return doc


def export_layout_json(lens):
    return json.dumps(export_layout(lens), sort_keys=True,
                      separators=(",", ":"))


def lens_from_json(text, layout):
    """Rebuild an encoded lens from an exported viewer document.

    The document carries the encoding state (series, ordering, filter,
    normalization flags); ``layout`` supplies the geometry and must be the
    layout the document was exported from. Re-exporting the result
    reproduces the document.

    Parameters
    ----------
    text : str
        JSON produced by export_layout_json.
    layout : RibbonLayout

    Returns
    -------
    EncodedLens

    Raises
    ------
    InputError
        On schema mismatches or an assignment that is not a permutation.
    """
    doc = json.loads(text)
    version = doc.get("schema_version")
    if version != 1:
        raise InputError(f"unsupported viewer document schema {version!r}")
    if doc["n_ribbons"] != layout.n_ribbons:
        raise InputError(f"document has {doc['n_ribbons']} ribbons, layout "
                         f"has {layout.n_ribbons}")
    series = [TemporalSeries(facade_id=s["facade"],
                             values=np.array(s["values"], dtype=float),
                             cyclic=doc["cyclic"])
              for s in doc["series"]]
    lens = bind_series(layout, series, time_direction=doc["time_direction"],
                       two_tone=doc["two_tone"])
    assignment = tuple(int(t) for t in doc["assignment"])
    if sorted(assignment) != list(range(layout.n_ribbons)):
        raise InputError("document assignment is not a ribbon permutation")
    lens = replace(lens, assignment=assignment)
    if doc["filter"] is not None:
        lens = filter_values(lens, doc["filter"]["lo"], doc["filter"]["hi"],
                             doc["filter"]["p"])
    return lens


from .svg_render import render_svg  # noqa: E402  (public re-export)
