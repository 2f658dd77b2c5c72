import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from footlens.errors import InputError
from footlens.geometry import RasterGrid, rasterize
from footlens.skeleton import (
    extract_signature,
    neighbor_count_image,
    skeletonize,
)

from conftest import make_polygon
from oracles import skeleton_graph_counts


def grid_from_mask(mask, cell=1.0):
    mask = np.asarray(mask, dtype=bool)
    return RasterGrid(width=mask.shape[1], height=mask.shape[0],
                      origin=np.zeros(2), cell_size=cell, bits=mask)


def bar_mask(w=40, h=3, pad=2):
    m = np.zeros((h + 2 * pad, w + 2 * pad), dtype=bool)
    m[pad:pad + h, pad:pad + w] = True
    return m


def plus_mask(size=32, arm=6):
    # Hand-checkable plus: two crossing bars on a 32x32 canvas.
    m = np.zeros((size, size), dtype=bool)
    c = size // 2
    m[c - arm:c + arm, 4:size - 4] = True
    m[4:size - 4, c - arm:c + arm] = True
    return m


def test_bar_centerline():
    grid = grid_from_mask(bar_mask())
    skel = skeletonize(grid)
    ys, xs = np.nonzero(skel.cells)
    # A 3-wide bar thins to its middle row only.
    assert set(ys) == {3}
    assert xs.max() - xs.min() >= 30


def test_square_skeleton_on_diagonals():
    sq = make_polygon("sq", [[0, 0], [1, 0], [1, 1], [0, 1]])
    grid = rasterize(sq, resolution=64)
    skel = skeletonize(grid)
    ys, xs = np.nonzero(skel.cells)
    px, py = grid.cell_to_world(ys, xs)
    # Medial axis of a square: the two diagonals. Every skeletal cell must
    # sit within a cell of one of them.
    d1 = np.abs(px - py) / np.sqrt(2.0)
    d2 = np.abs(px + py - 1.0) / np.sqrt(2.0)
    assert np.minimum(d1, d2).max() <= 1.5 * grid.cell_size


def test_plus_has_central_crossing():
    grid = grid_from_mask(plus_mask())
    skel = skeletonize(grid)
    counts = neighbor_count_image(skel.cells)
    ys, xs = np.nonzero(skel.cells & (counts >= 3))
    assert ys.size > 0
    # The junction blob straddles the canvas center.
    assert abs(ys.mean() - 15.5) <= 2.0
    assert abs(xs.mean() - 15.5) <= 2.0
    sig = extract_signature(skel)
    assert all(d >= 3 for _, d in sig.junctions)


def test_empty_grid_rejected():
    grid = grid_from_mask(np.zeros((8, 8), dtype=bool))
    with pytest.raises(InputError):
        skeletonize(grid)


def test_thinness(l_poly, u_poly, t_poly):
    for poly in (l_poly, u_poly, t_poly):
        skel = skeletonize(rasterize(poly, resolution=256))
        c = skel.cells
        blocks = c[:-1, :-1] & c[1:, :-1] & c[:-1, 1:] & c[1:, 1:]
        assert not blocks.any()
        assert (c & ~skel.grid.bits).sum() == 0


def test_idempotence(l_poly):
    skel = skeletonize(rasterize(l_poly, resolution=256))
    again = skeletonize(grid_from_mask(skel.cells,
                                       cell=skel.grid.cell_size))
    assert (again.cells == skel.cells).all()


def test_line_signature():
    # A skeleton that is already a bare line: no junctions, two ends.
    m = np.zeros((7, 30), dtype=bool)
    m[3, 2:28] = True
    sig = extract_signature(skeletonize(grid_from_mask(m)))
    assert len(sig.junctions) == 0
    assert len(sig.endpoints) == 2


def test_t_signature(t_poly):
    skel = skeletonize(rasterize(t_poly, resolution=256))
    sig = extract_signature(skel)
    trifurcations = [(p, d) for p, d in sig.junctions if d == 3]
    assert len(trifurcations) >= 1
    # One junction sits where the stem axis meets the bar axis, near
    # (1.5, 0.5) in world space.
    crossing = min(sig.junctions,
                   key=lambda j: np.hypot(j[0][0] - 1.5, j[0][1] - 0.5))
    assert np.hypot(crossing[0][0] - 1.5, crossing[0][1] - 0.5) < 0.3


def test_zero_cell_signature_rejected():
    skel = skeletonize(grid_from_mask(bar_mask()))
    empty = type(skel)(cells=np.zeros_like(skel.cells), grid=skel.grid)
    with pytest.raises(InputError):
        extract_signature(empty)


@given(st.integers(24, 96), st.integers(10, 20))
@settings(max_examples=25, deadline=None)
def test_rectangle_signature_property(w, h):
    # Wide-enough rectangles thin to the two-Y shape: 2 junctions,
    # 4 endpoints, all trifurcations.
    if w < 2 * h:
        w = 2 * h + (w % 7)
    m = np.zeros((h + 4, w + 4), dtype=bool)
    m[2:2 + h, 2:2 + w] = True
    sig = extract_signature(skeletonize(grid_from_mask(m)))
    assert len(sig.junctions) == 2
    assert len(sig.endpoints) == 4
    assert all(d == 3 for _, d in sig.junctions)


def test_euler_consistency(l_poly, u_poly, t_poly):
    # #endpoints + sum(degree - 2) over junctions equals twice the branch
    # count minus twice the junction count of the independently traced
    # skeleton graph (the tree identity, immune to how junction blobs
    # cluster).
    for poly in (l_poly, u_poly, t_poly):
        skel = skeletonize(rasterize(poly, resolution=192))
        sig = extract_signature(skel, endpoint_exclusion=0.0)
        n_branches, n_junctions = skeleton_graph_counts(skel.cells)
        lhs = len(sig.endpoints) + sum(d - 2 for _, d in sig.junctions)
        assert lhs == 2 * (n_branches - n_junctions)
