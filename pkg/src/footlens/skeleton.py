"""Raster skeletons and their topological signatures.

The thinning is homotopic and distance-ordered: centers of maximal balls are
kept as anchors, every other simple cell is removed shallow-first, and a
second pass erases anchor ridges while preserving branch endpoints. The
result is one cell wide, 8-connected, and centered, with the Y-shaped branch
structure at rectangle ends that the downstream cutline search relies on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ._kernels import thin_skeleton
from .errors import InputError
from .geometry import RasterGrid

_OFFS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))
_EIGHT = np.ones((3, 3), dtype=int)


@dataclass
class SkeletonImage:
    """One-cell-wide skeletal mask over a source raster."""

    cells: np.ndarray = field(repr=False)
    grid: RasterGrid = None

    def cell_count(self):
        return int(self.cells.sum())


@dataclass
class TopoSignature:
    """Junctions, endpoints, and the per-cell neighbor-count image.

    junctions : list of (point, degree)
        World-space centroid of each junction cluster with its branch degree.
    endpoints : (e, 2) float array
        World-space centers of cells with exactly one skeletal neighbor,
        excluding those within the exclusion radius of a junction.
    neighbor_counts : (h, w) uint8 array
    """

    junctions: list
    endpoints: np.ndarray
    neighbor_counts: np.ndarray = field(repr=False)


def simple_point_lut():
    """256-entry table: neighbor code -> cell removable without topology change.

    A cell is simple when its occupied 8-neighbors form exactly one
    8-connected object and the 4-adjacent background positions belong to
    exactly one 4-connected background component within the 3x3 patch.
    """
    lut = np.zeros(256, dtype=np.uint8)
    for code in range(256):
        nbr = [(code >> i) & 1 for i in range(8)]
        cells = [off for i, off in enumerate(_OFFS) if nbr[i]]
        if not cells:
            continue
        # One object among occupied neighbors, 8-connectivity.
        seen = {cells[0]}
        stack = [cells[0]]
        cellset = set(cells)
        while stack:
            cy, cx = stack.pop()
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    q = (cy + dy, cx + dx)
                    if q in cellset and q not in seen:
                        seen.add(q)
                        stack.append(q)
        if len(seen) != len(cells):
            continue
        # One background component touching a 4-neighbor position.
        bg = [off for i, off in enumerate(_OFFS) if not nbr[i]]
        bgset = set(bg)
        four = [p for p in ((-1, 0), (0, -1), (0, 1), (1, 0)) if p in bgset]
        if not four:
            continue
        seen = {four[0]}
        stack = [four[0]]
        while stack:
            cy, cx = stack.pop()
            for dy, dx in ((-1, 0), (0, -1), (0, 1), (1, 0)):
                q = (cy + dy, cx + dx)
                if q in bgset and q not in seen:
                    seen.add(q)
                    stack.append(q)
        if all(p in seen for p in four):
            lut[code] = 1
    return lut


_LUT = simple_point_lut()


def _maximal_ball_anchors(occ, dist):
    # Keep cells not dominated by any neighbor: q dominates p when a ball
    # at q covers the ball at p (dist[q] >= dist[p] + |pq|, with slack for
    # the exact-EDT float math).
    h, w = occ.shape
    po = np.zeros((h + 2, w + 2), dtype=bool)
    pd = np.zeros((h + 2, w + 2), dtype=float)
    po[1:-1, 1:-1] = occ
    pd[1:-1, 1:-1] = dist
    dominated = np.zeros_like(occ)
    for dy, dx in _OFFS:
        qo = po[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]
        qd = pd[1 + dy:h + 1 + dy, 1 + dx:w + 1 + dx]
        step = float(np.hypot(dy, dx))
        dominated |= occ & qo & (qd >= dist + step - 1e-7)
    return occ & ~dominated


def _resolve_anchor_ties(occ, anchors):
    # Fully anchored 2x2 blocks cannot thin to one cell wide. X-shaped ties
    # (four diagonal continuations) keep one junction cell and re-route the
    # anti-diagonal branches through elbow cells; strip-shaped ties keep the
    # main-diagonal pair.
    h, w = anchors.shape

    def a(y, x):
        return 0 <= y < h and 0 <= x < w and anchors[y, x]

    changed = True
    while changed:
        changed = False
        blocks = np.argwhere(anchors[:-1, :-1] & anchors[:-1, 1:]
                             & anchors[1:, :-1] & anchors[1:, 1:])
        for y, x in blocks:
            if not (anchors[y, x] and anchors[y, x + 1]
                    and anchors[y + 1, x] and anchors[y + 1, x + 1]):
                continue
            diag = (a(y - 1, x - 1) + a(y + 2, x + 2)
                    + a(y - 1, x + 2) + a(y + 2, x - 1))
            if diag >= 3:
                anchors[y, x + 1] = anchors[y + 1, x] = anchors[y + 1, x + 1] = False
                if y - 1 >= 0 and x + 1 < w and occ[y - 1, x + 1]:
                    anchors[y - 1, x + 1] = True
                if y + 1 < h and x - 1 >= 0 and occ[y + 1, x - 1]:
                    anchors[y + 1, x - 1] = True
            else:
                anchors[y, x + 1] = anchors[y + 1, x] = False
            changed = True
    return anchors


def skeletonize(grid):
    """Thin a connected occupancy raster to its skeleton.

    Parameters
    ----------
    grid : RasterGrid

    Returns
    -------
    SkeletonImage

    Raises
    ------
    InputError
        If the occupancy is empty or not 8-connected.
    """
    occ = grid.bits
    if not occ.any():
        raise InputError("empty grid: nothing to skeletonize")
    _, n_comp = ndimage.label(occ, structure=_EIGHT)
    if n_comp != 1:
        raise InputError(f"occupancy has {n_comp} components, expected 1")

    dist = ndimage.distance_transform_edt(occ)
    anchors = _maximal_ball_anchors(occ, dist)
    anchors = _resolve_anchor_ties(occ, anchors)
    cells = thin_skeleton(occ.astype(np.uint8), dist,
                          anchors.astype(np.uint8), _LUT).astype(bool)
    # Sub-cell-scale artifacts the anchors kept: length-1 spurs hugging a
    # junction cell, and triangle cells on near-diagonal runs (a two-
    # neighbor cell whose neighbors touch each other; removal cannot
    # disconnect). Both fragment junction zones, so iterate to a fixed
    # point; tips away from junctions are never touched.
    while True:
        counts = neighbor_count_image(cells)
        tips = cells & (counts == 1)
        near_junction = ndimage.binary_dilation(cells & (counts >= 3),
                                                structure=_EIGHT)
        drop = tips & near_junction
        drop |= _redundant_triangle_cells(cells, counts)
        if not drop.any():
            break
        cells &= ~drop
    return SkeletonImage(cells=cells, grid=grid)


def _redundant_triangle_cells(cells, counts):
    # Count-2 cells whose two neighbors are mutually 8-adjacent; batch only
    # pairwise non-adjacent picks so one sweep cannot disconnect anything.
    drop = np.zeros_like(cells)
    kept = []
    for y, x in np.argwhere(cells & (counts == 2)):
        nb = [(y + dy, x + dx) for dy, dx in _OFFS
              if 0 <= y + dy < cells.shape[0] and 0 <= x + dx < cells.shape[1]
              and cells[y + dy, x + dx]]
        (ay, ax), (by, bx) = nb
        if max(abs(ay - by), abs(ax - bx)) != 1:
            continue
        if any(max(abs(y - ky), abs(x - kx)) <= 1 for ky, kx in kept):
            continue
        kept.append((y, x))
        drop[y, x] = True
    return drop


def neighbor_count_image(cells):
    """Count of skeletal 8-neighbors per cell (zero off the skeleton)."""
    counts = ndimage.convolve(cells.astype(np.uint8), _EIGHT.astype(np.uint8),
                              mode="constant", cval=0)
    counts -= cells.astype(np.uint8)
    counts[~cells] = 0
    return counts.astype(np.uint8)


def trace_graph(cells):
    """Decompose a thin skeleton into junction clusters and branch paths.

    Returns
    -------
    clusters : list of (k, 2) int arrays
        Cell indices (y, x) of each junction cluster (neighbor count >= 3,
        clustered 8-connected).
    branches : list of dict
        Each with 'path' (ordered (m, 2) int array including any terminal
        cluster-adjacent cells), 'ends' (pair of cluster indices or -1 for a
        free end).
    """
    counts = neighbor_count_image(cells)
    junction_mask = cells & (counts >= 3)
    labels, n_clusters = ndimage.label(junction_mask, structure=_EIGHT)
    clusters = [np.argwhere(labels == i + 1) for i in range(n_clusters)]

    rest = cells & ~junction_mask
    seg_labels, n_segs = ndimage.label(rest, structure=_EIGHT)
    branches = []
    h, w = cells.shape
    for s in range(1, n_segs + 1):
        path_cells = np.argwhere(seg_labels == s)
        path = _order_path(path_cells, cells)
        if path.shape[0] == 1:
            # One adjacency incidence per end: a lone cell touching one
            # cluster cell is a spur (c, -1); touching two cluster cells is
            # a loop (c, c) or a bridge (c1, c2).
            y, x = path[0]
            touching = []
            for dy, dx in _OFFS:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and labels[yy, xx] > 0:
                    touching.append(labels[yy, xx] - 1)
            touching = (touching + [-1, -1])[:2]
            branches.append({"path": path, "ends": tuple(touching)})
            continue
        ends = []
        for cell in (path[0], path[-1]):
            y, x = cell
            touched = -1
            for dy, dx in _OFFS:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and labels[yy, xx] > 0:
                    touched = labels[yy, xx] - 1
                    break
            ends.append(touched)
        branches.append({"path": path, "ends": tuple(ends)})
    return clusters, branches


def _order_path(path_cells, cells):
    # Order a degree-<=2 cell set into a walk; single cells pass through.
    if path_cells.shape[0] <= 1:
        return path_cells
    cellset = {(int(y), int(x)) for y, x in path_cells}
    deg = {}
    for y, x in cellset:
        deg[(y, x)] = sum(((y + dy, x + dx) in cellset) for dy, dx in _OFFS)
    terminals = sorted(c for c, d in deg.items() if d <= 1)
    start = terminals[0] if terminals else min(cellset)
    order = [start]
    seen = {start}
    while True:
        y, x = order[-1]
        nxt = None
        for dy, dx in _OFFS:
            q = (y + dy, x + dx)
            if q in cellset and q not in seen:
                nxt = q
                break
        if nxt is None:
            break
        order.append(nxt)
        seen.add(nxt)
    return np.array(order, dtype=np.int64)


def extract_signature(skeleton, endpoint_exclusion=3.0):
    """Junctions (clustered, with degree) and endpoints of a thin skeleton.

    Parameters
    ----------
    skeleton : SkeletonImage
    endpoint_exclusion : float
        Endpoints closer than this many cells to a junction centroid are
        treated as junction fringe and dropped.

    Returns
    -------
    TopoSignature
    """
    cells = skeleton.cells
    if not cells.any():
        raise InputError("skeleton has no cells")
    grid = skeleton.grid
    counts = neighbor_count_image(cells)
    clusters, branches = trace_graph(cells)

    degrees = [0] * len(clusters)
    for br in branches:
        for e in br["ends"]:
            if e >= 0:
                degrees[e] += 1
    # Two clusters touching directly (no branch between them) still owe each
    # other a degree; detect via adjacency of cluster cells.
    if len(clusters) > 1:
        occupied = {}
        for ci, cl in enumerate(clusters):
            for y, x in cl:
                occupied[(int(y), int(x))] = ci
        seen_pairs = set()
        for (y, x), ci in occupied.items():
            for dy, dx in _OFFS:
                cj = occupied.get((y + dy, x + dx))
                if cj is not None and cj != ci:
                    pair = (min(ci, cj), max(ci, cj))
                    if pair not in seen_pairs:
                        seen_pairs.add(pair)
                        degrees[ci] += 1
                        degrees[cj] += 1

    cell = grid.cell_size if grid is not None else 1.0
    junctions = []
    for ci, cl in enumerate(clusters):
        cy, cx = cl.mean(axis=0)
        if grid is not None:
            x, y = grid.cell_to_world(cy, cx)
            pt = np.array([float(x), float(y)])
        else:
            pt = np.array([cx, cy])
        d = degrees[ci]
        if d >= 4:
            # Split along the axis of larger cluster extent (x on ties):
            # the downstream pairing logic expects trifurcations.
            ext = cl.max(axis=0) - cl.min(axis=0)
            axis = np.array([0.5 * cell, 0.0]) if ext[1] >= ext[0] \
                else np.array([0.0, 0.5 * cell])
            junctions.append((pt - axis, 3))
            junctions.append((pt + axis, 3))
        else:
            junctions.append((pt, d))

    ey, ex = np.nonzero(cells & (counts == 1))
    if grid is not None:
        wx, wy = grid.cell_to_world(ey, ex)
        endpoints = np.column_stack([wx, wy])
    else:
        endpoints = np.column_stack([ex, ey]).astype(float)
    if junctions and endpoints.shape[0]:
        jpts = np.array([p for p, _ in junctions])
        d2 = ((endpoints[:, None, :] - jpts[None, :, :]) ** 2).sum(axis=2)
        keep = np.sqrt(d2.min(axis=1)) > endpoint_exclusion * cell
        endpoints = endpoints[keep]

    return TopoSignature(junctions=junctions, endpoints=endpoints,
                         neighbor_counts=counts)
