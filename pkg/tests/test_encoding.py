import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from footlens.encoding import (
    PALETTE,
    TemporalSeries,
    bind_series,
    cell_color,
    cell_parts,
    export_layout,
    export_layout_json,
    filter_values,
    glyphs,
    lens_from_json,
    reorder,
    two_tone_parts,
)
from footlens.errors import BindingError, InputError
from footlens.ribbons import assemble_layout, sector_curves
from footlens.svg_render import render_svg

from conftest import full_layout, make_polygon
from oracles import shoelace_area

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]

# Four facades x four seasons of a shadow-hours style attribute. Values are
# picked so the attribute ordering differs from chronological and the top
# quartile is a proper subset of the cells.
SEASONS = {0: [1.0, 3.5, 2.25, 0.5],
           1: [2.0, 4.75, 3.0, 1.25],
           2: [0.25, 1.5, 5.0, 2.75],
           3: [3.25, 6.0, 4.5, 2.5]}


def season_series(cyclic=True):
    return [TemporalSeries(f, SEASONS[f], cyclic=cyclic)
            for f in sorted(SEASONS)]


@pytest.fixture(scope="module")
def square_scene():
    return full_layout(make_polygon("square", SQUARE))


@pytest.fixture(scope="module")
def square_layout(square_scene):
    return square_scene[2]


@pytest.fixture(scope="module")
def lens(square_layout):
    return bind_series(square_layout, season_series())


def colors_of(lens_):
    return {(c.ribbon, c.facade): cell_color(lens_, c.ribbon, c.facade)
            for c in lens_.layout.cells}


def test_chronological_binding(square_layout, lens):
    # Inner-earliest: the innermost ribbon (highest index) shows step 0.
    assert lens.assignment == (3, 2, 1, 0)
    for f in SEASONS:
        assert lens.value_at(3, f) == SEASONS[f][0]
        assert lens.value_at(0, f) == SEASONS[f][3]
    assert lens.vmin == 0.25 and lens.vmax == 6.0
    outer = bind_series(square_layout, season_series(),
                        time_direction="outer-earliest")
    assert outer.assignment == (0, 1, 2, 3)


def test_binding_rejects_mismatches(square_layout):
    full = season_series()
    with pytest.raises(BindingError, match=r"missing \[2\]"):
        bind_series(square_layout, [s for s in full if s.facade_id != 2])
    with pytest.raises(BindingError, match=r"unmatched \[7\]"):
        bind_series(square_layout,
                    full + [TemporalSeries(7, [0, 0, 0, 0], cyclic=True)])
    short = full[:3] + [TemporalSeries(3, [1.0, 2.0, 3.0], cyclic=True)]
    with pytest.raises(BindingError, match="3 samples for 4 ribbons"):
        bind_series(square_layout, short)
    mixed = full[:3] + [TemporalSeries(3, SEASONS[3], cyclic=False)]
    with pytest.raises(BindingError, match="cyclicity"):
        bind_series(square_layout, mixed)
    with pytest.raises(BindingError, match="duplicate"):
        bind_series(square_layout,
                    full + [TemporalSeries(3, SEASONS[3], cyclic=True)])


@given(st.integers(-8, 8), st.integers(-8, 8))
@settings(max_examples=50, deadline=None)
def test_wrap_shifts_compose_modulo_ribbon_count(lens, ka, kb):
    lhs = reorder(reorder(lens, f"wrap:{ka}"), f"wrap:{kb}")
    rhs = reorder(lens, f"wrap:{(ka + kb) % 4}")
    assert lhs.assignment == rhs.assignment


def test_wrap_identities(lens):
    assert reorder(lens, "wrap:0").assignment == lens.assignment
    assert reorder(lens, "wrap:4").assignment == lens.assignment
    assert reorder(lens, "wrap:1").assignment == (0, 3, 2, 1)


def test_wrap_requires_cyclic_series(square_layout):
    acyclic = bind_series(square_layout, season_series(cyclic=False))
    with pytest.raises(InputError, match="cyclic"):
        reorder(acyclic, "wrap:1")


def test_attribute_order_matches_sort_oracle(lens):
    n = lens.n_ribbons
    for name, agg in [("mean", lambda v: sum(v) / len(v)),
                      ("max", max), ("min", min)]:
        stats = [agg([SEASONS[f][t] for f in SEASONS]) for t in range(n)]
        order = sorted(range(n), key=lambda t: (stats[t], t))
        # Ribbon at chronological position i shows the i-th smallest step.
        expected = tuple(order[n - 1 - r] for r in range(n))
        assert reorder(lens, f"attribute:{name}").assignment == expected
    assert reorder(lens, "attribute:mean").assignment == (1, 2, 3, 0)


def test_increasing_means_keep_chronological_order(square_layout):
    series = [TemporalSeries(f, [1.0 + t + 0.1 * f for t in range(4)])
              for f in SEASONS]
    inc = bind_series(square_layout, series)
    assert reorder(inc, "attribute:mean").assignment == inc.assignment


def test_reorder_is_pure_and_validates(lens):
    before = lens.assignment
    reorder(lens, "wrap:2")
    assert lens.assignment == before
    with pytest.raises(InputError, match="median"):
        reorder(lens, "attribute:median")
    with pytest.raises(InputError, match="ordering"):
        reorder(lens, "alphabetical")
    with pytest.raises(InputError, match="wrap"):
        reorder(lens, "wrap:two")


def test_filter_preserves_values(lens):
    filtered = filter_values(lens, 3.75, 6.0, 0.2)
    for c in lens.layout.cells:
        assert filtered.value_at(c.ribbon, c.facade) == \
            lens.value_at(c.ribbon, c.facade)
    assert filtered.vmin == lens.vmin and filtered.vmax == lens.vmax
    assert filtered.series is lens.series
    assert lens.filter_range is None


def test_filter_identities(lens):
    assert colors_of(filter_values(lens, 3.75, 6.0, 1.0)) == colors_of(lens)
    assert colors_of(filter_values(lens, 0.25, 6.0, 0.3)) == colors_of(lens)


def test_filter_desaturates_exactly_the_out_of_range_cells(lens):
    allv = np.concatenate([np.asarray(SEASONS[f], float)
                           for f in sorted(SEASONS)])
    q3 = float(np.quantile(allv, 0.75))
    assert q3 == 3.75
    base = colors_of(lens)
    dimmed = colors_of(filter_values(lens, q3, 6.0, 0.2))
    changed = {k for k in base if base[k] != dimmed[k]}
    outside = {(c.ribbon, c.facade) for c in lens.layout.cells
               if not q3 <= lens.value_at(c.ribbon, c.facade) <= 6.0}
    assert changed == outside
    assert len(changed) == 12


def test_filter_validation(lens):
    with pytest.raises(InputError, match="inverted"):
        filter_values(lens, 4.0, 1.0, 0.5)
    with pytest.raises(InputError, match=r"\[0, 1\]"):
        filter_values(lens, 1.0, 4.0, 1.5)


def test_two_tone_fraction_formula(square_layout):
    tt = bind_series(square_layout, season_series(), two_tone=True)
    bins = len(PALETTE) - 1
    for c in square_layout.cells:
        v = tt.value_at(c.ribbon, c.facade)
        # Fraction inside the bracketing palette bin, from the bin values.
        j = min(int((v - tt.vmin) / (tt.vmax - tt.vmin) * bins), bins - 1)
        c_lo = tt.vmin + j / bins * (tt.vmax - tt.vmin)
        c_hi = tt.vmin + (j + 1) / bins * (tt.vmax - tt.vmin)
        lo, hi, f = two_tone_parts(tt, c.ribbon, c.facade)
        assert 0.0 <= f <= 1.0
        assert abs(f - (v - c_lo) / (c_hi - c_lo)) < 1e-12


@given(st.lists(st.floats(0.0, 10.0), min_size=16, max_size=16))
@settings(max_examples=40, deadline=None)
def test_two_tone_split_is_monotone_in_value(square_layout, flat):
    table = np.array(flat).reshape(4, 4)
    tt = bind_series(square_layout,
                     [TemporalSeries(f, table[f]) for f in range(4)],
                     two_tone=True)
    keyed = []
    for c in square_layout.cells:
        v = tt.value_at(c.ribbon, c.facade)
        x = np.clip((v - tt.vmin) / (tt.vmax - tt.vmin)
                    if tt.vmax > tt.vmin else 0.5, 0, 1) * (len(PALETTE) - 1)
        j = min(int(x), len(PALETTE) - 2)
        _, _, f = two_tone_parts(tt, c.ribbon, c.facade)
        keyed.append((v, (j, f)))
    keyed.sort(key=lambda kv: kv[0])
    for (va, ka), (vb, kb) in zip(keyed, keyed[1:]):
        assert ka <= kb
        if va == vb:
            assert ka == kb


def test_two_tone_parts_partition_each_cell(square_layout):
    tt = bind_series(square_layout, season_series(), two_tone=True)
    for c in square_layout.cells:
        parts = cell_parts(tt, c)
        _, _, f = two_tone_parts(tt, c.ribbon, c.facade)
        assert len(parts) == (1 if f < 1e-9 or f > 1 - 1e-9 else 2)
        total = sum(abs(shoelace_area(ring)) for ring, _ in parts)
        assert abs(total - abs(shoelace_area(c.polygon))) < 1e-9


def test_plain_svg_structure(lens):
    svg = render_svg(lens, draw_glyphs=False)
    # 16 cell paths plus the footprint outline and one core loop.
    assert svg.count("<path") == 18
    swatches = [m.split('fill="')[1][:7]
                for m in svg.split("\n") if m.startswith("<rect")]
    assert swatches == PALETTE
    assert ">0.25</text>" in svg and ">6</text>" in svg
    ET.fromstring(svg)


def test_two_tone_svg_path_count(square_layout):
    tt = bind_series(square_layout, season_series(), two_tone=True)
    svg = render_svg(tt, draw_glyphs=False)
    # Every cell splits in two except the vmin and vmax cells, whose split
    # is degenerate; plus footprint and core outlines.
    assert svg.count("<path") == 2 * 16 - 2 + 2
    assert svg.count("<path") <= 2 * 16 + 2
    ET.fromstring(svg)


def test_svg_is_byte_stable(square_layout, lens):
    svg = render_svg(lens)
    assert render_svg(lens) == svg
    rebuilt = bind_series(square_layout, season_series())
    assert render_svg(rebuilt) == svg
    assert render_svg(lens, draw_glyphs=False) != svg


def _polyline_gap(p, pts):
    a, b = pts[:-1], pts[1:]
    e = b - a
    t = ((p - a) * e).sum(axis=1) / np.maximum((e * e).sum(axis=1), 1e-300)
    foot = a + np.clip(t, 0.0, 1.0)[:, None] * e
    return float(np.sqrt(((p - foot) ** 2).sum(axis=1)).min())


def test_glyph_anchors_sit_on_sector_curves(square_layout, lens):
    curves = {(s.node_id, s.theta): s.points
              for s in sector_curves(square_layout)}
    marks = glyphs(lens)
    assert len(marks) == len(curves) == 4
    for g in marks:
        at = np.asarray(g["at"])
        d = np.asarray(g["dir"])
        assert _polyline_gap(at, curves[(g["node"], g["theta"])]) < 1e-6
        assert abs(np.hypot(*d) - 1.0) < 1e-12
        # Later time sits outward for the default direction.
        assert np.dot(d, at - [0.5, 0.5]) > 0
    flipped = bind_series(square_layout, season_series(),
                          time_direction="outer-earliest")
    for g in glyphs(flipped):
        assert np.dot(g["dir"], np.asarray(g["at"]) - [0.5, 0.5]) < 0


def test_export_document_shape(lens):
    doc = export_layout(reorder(lens, "wrap:1"))
    assert doc["schema_version"] == 1
    assert doc["assignment"] == [0, 3, 2, 1]
    assert doc["n_ribbons"] == 4 and doc["cyclic"] is True
    assert doc["palette"] == PALETTE
    assert doc["normalization"] == {"vmin": 0.25, "vmax": 6.0}
    assert len(doc["cells"]) == 16
    keys = [(c["ribbon"], c["facade"]) for c in doc["cells"]]
    assert keys == sorted(keys)
    assert [s["facade"] for s in doc["series"]] == [0, 1, 2, 3]
    for s in doc["series"]:
        assert s["values"] == SEASONS[s["facade"]]


def test_export_import_round_trip(square_layout, lens):
    for shaped in [lens,
                   filter_values(reorder(lens, "wrap:2"), 1.0, 4.0, 0.3),
                   bind_series(square_layout, season_series(),
                               two_tone=True)]:
        text = export_layout_json(shaped)
        back = lens_from_json(text, square_layout)
        assert export_layout_json(back) == text
        assert back.assignment == shaped.assignment
        assert back.filter_range == shaped.filter_range
        assert (back.vmin, back.vmax) == (shaped.vmin, shaped.vmax)
        assert back.two_tone == shaped.two_tone
        assert back.cyclic == shaped.cyclic
        for f in shaped.series:
            assert np.array_equal(back.series[f].values,
                                  shaped.series[f].values)


def test_import_rejects_foreign_documents(square_layout, lens):
    doc = export_layout(lens)
    doc["schema_version"] = 2
    with pytest.raises(InputError, match="schema"):
        lens_from_json(json.dumps(doc), square_layout)
    doc["schema_version"] = 1
    doc["assignment"] = [0, 0, 1, 2]
    with pytest.raises(InputError, match="permutation"):
        lens_from_json(json.dumps(doc), square_layout)
    doc["assignment"] = [3, 2, 1, 0]
    doc["n_ribbons"] = 6
    with pytest.raises(InputError, match="ribbons"):
        lens_from_json(json.dumps(doc), square_layout)


def test_six_ribbon_export_has_24_cell_records(square_scene):
    graph, maps, _ = square_scene
    poly = make_polygon("square", SQUARE)
    layout = assemble_layout(poly, graph.nodes, maps, [], n_ribbons=6)
    series = [TemporalSeries(f, [SEASONS[f][t % 4] for t in range(6)])
              for f in sorted(SEASONS)]
    doc = export_layout(bind_series(layout, series))
    assert len(doc["cells"]) == 24


def test_degenerate_value_ranges(square_layout):
    zeros = bind_series(square_layout,
                        [TemporalSeries(f, [0.0] * 4) for f in range(4)])
    # All-equal data normalizes to the palette midpoint everywhere.
    assert set(colors_of(zeros).values()) == {PALETTE[3]}
    per_time = bind_series(square_layout,
                           [TemporalSeries(f, [1.0, 2.0, 3.0, 4.0])
                            for f in range(4)])
    shades = colors_of(per_time)
    for r in range(4):
        assert len({shades[(r, f)] for f in range(4)}) == 1
