"""Planar polygon model, rasterization, and exact distance fields.

Everything downstream consumes these three types. Distances are always
computed geometrically against the polygon edges; raster grids only choose
where to sample.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import min_edge_distance
from .errors import InputError

_DEGENERATE_AREA = 1e-12


@dataclass
class FootprintPolygon:
    """Closed planar polygon with one facade identifier per edge.

    Parameters
    ----------
    vertices : (n, 2) float array
        Exterior ring, one row per vertex, without a repeated closing
        vertex. Stored counter-clockwise; clockwise input is reversed.
    facade_ids : list of int or str
        Identifier of edge k = vertices[k] -> vertices[k+1 mod n].
        Integers name real facades; string identifiers are reserved for
        synthetic edges introduced by the partition (cut chords).
    units : str
        Length unit tag, informational only.
    name : str
        Identifier used to reference this polygon from derived artifacts.
    """

    vertices: np.ndarray
    facade_ids: list = None
    units: str = "m"
    name: str = "footprint"

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InputError("polygon needs at least 3 two-dimensional vertices")
        if not np.isfinite(v).all():
            raise InputError("polygon has non-finite coordinates")
        if np.hypot(*(v[0] - v[-1])) == 0.0:
            v = v[:-1]
            if v.shape[0] < 3:
                raise InputError("polygon needs at least 3 distinct vertices")
        signed = _signed_area(v)
        if abs(signed) <= _DEGENERATE_AREA * max(1.0, _extent(v) ** 2):
            raise InputError("degenerate polygon: area is zero")
        if self.facade_ids is None:
            ids = list(range(v.shape[0]))
        else:
            ids = list(self.facade_ids)
        if len(ids) != v.shape[0]:
            raise InputError(
                f"facade_ids length {len(ids)} != edge count {v.shape[0]}")
        if signed < 0.0:
            v = v[::-1].copy()
            # Edge k of the reversed ring is old edge n-1-k walked backwards.
            ids = ids[::-1]
            ids = ids[1:] + ids[:1]
        if _self_intersects(v):
            raise InputError("polygon is self-intersecting")
        self.vertices = v
        self.facade_ids = ids

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    def edges(self):
        """Return (a, b) arrays of edge start/end points, each (n, 2)."""
        v = self.vertices
        return v, np.roll(v, -1, axis=0)

    def diameter(self):
        """Largest pairwise vertex distance."""
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d * d).sum(axis=2)).max())

    def contains(self, points):
        """Even-odd containment test for an (m, 2) array of points."""
        return points_in_polygon(np.asarray(points, dtype=float), self.vertices)

    def boundary_distance(self, points):
        """Exact distance from each of (m, 2) points to the boundary."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a, b = self.edges()
        return min_edge_distance(pts[:, 0], pts[:, 1],
                                 a[:, 0], a[:, 1], b[:, 0], b[:, 1])


@dataclass
class RasterGrid:
    """Binary occupancy raster with a world-space georeference."""

    width: int
    height: int
    origin: np.ndarray
    cell_size: float
    bits: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.cell_size <= 0.0:
            raise InputError("cell_size must be positive")
        self.origin = np.asarray(self.origin, dtype=float)
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.shape != (self.height, self.width):
            raise InputError("bits shape does not match width/height")

    def cell_to_world(self, iy, ix):
        """World coordinates of cell centers (iy, ix may be arrays)."""
        x = self.origin[0] + (np.asarray(ix, dtype=float) + 0.5) * self.cell_size
        y = self.origin[1] + (np.asarray(iy, dtype=float) + 0.5) * self.cell_size
        return x, y

    def world_to_cell(self, x, y):
        """Indices of the cells containing world points."""
        ix = np.floor((np.asarray(x, dtype=float) - self.origin[0]) / self.cell_size)
        iy = np.floor((np.asarray(y, dtype=float) - self.origin[1]) / self.cell_size)
        return iy.astype(np.int64), ix.astype(np.int64)

    def occupied_area(self):
        return float(self.bits.sum()) * self.cell_size ** 2


@dataclass
class DistanceField:
    """Per-cell exact Euclidean distance to the nearest boundary edge.

    Values are in world units, zero outside and on unoccupied cells,
    strictly positive on interior cells.
    """

    grid: RasterGrid
    values: np.ndarray = field(repr=False)
    polygon_id: str = "footprint"
    polygon: FootprintPolygon = None


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _extent(v):
    spans = v.max(axis=0) - v.min(axis=0)
    return float(max(spans[0], spans[1]))


def _self_intersects(v):
    # O(n^2) proper-crossing test; rings here are small.
    n = v.shape[0]
    a = v
    b = np.roll(v, -1, axis=0)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_cross(a[i], b[i], a[j], b[j]):
                return True
    return False


def _segments_cross(p, q, r, s):
    def orient(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    d1 = orient(p, q, r)
    d2 = orient(p, q, s)
    d3 = orient(r, s, p)
    d4 = orient(r, s, q)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and \
        d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


def points_in_polygon(points, vertices):
    """Vectorized even-odd rule; points exactly on edges are rule-dependent."""
    x = points[:, 0][:, None]
    y = points[:, 1][:, None]
    x1, y1 = vertices[:, 0][None, :], vertices[:, 1][None, :]
    v2 = np.roll(vertices, -1, axis=0)
    x2, y2 = v2[:, 0][None, :], v2[:, 1][None, :]
    straddle = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = straddle & (x < xi)
    return hits.sum(axis=1) % 2 == 1


def area(polygon):
    """Shoelace area of the polygon in squared world units.

    Parameters
    ----------
    polygon : FootprintPolygon

    Returns
    -------
    float
        Positive area (vertices are stored counter-clockwise).
    """
    return _signed_area(polygon.vertices)


def centroid(polygon):
    """Area centroid of the polygon as a length-2 array."""
    v = polygon.vertices
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return np.array([cx, cy])


def rasterize(polygon, resolution=512, pad_cells=2):
    """Sample the polygon onto a regular grid of cell-center occupancy.

    Parameters
    ----------
    polygon : FootprintPolygon
    resolution : int
        Cell count along the longest bounding-box side. The supported
        contract starts at 32; smaller values down to 4 still rasterize
        correctly for debugging and toy grids.
    pad_cells : int
        Empty margin added on every side.

    Returns
    -------
    RasterGrid
        A cell is set iff its center lies inside the polygon.
    """
    if resolution < 4:
        raise InputError(f"resolution {resolution} < 4")
    v = polygon.vertices
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    cell = _extent(v) / float(resolution)
    origin = lo - pad_cells * cell
    width = int(np.ceil((hi[0] - lo[0]) / cell - 1e-12)) + 2 * pad_cells
    height = int(np.ceil((hi[1] - lo[1]) / cell - 1e-12)) + 2 * pad_cells

    ix = np.arange(width)
    iy = np.arange(height)
    cx = origin[0] + (ix + 0.5) * cell
    cy = origin[1] + (iy + 0.5) * cell
    gx, gy = np.meshgrid(cx, cy)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    bits = points_in_polygon(pts, v).reshape(height, width)
    return RasterGrid(width=width, height=height, origin=origin,
                      cell_size=cell, bits=bits)


def distance_field(polygon, grid):
    """Exact boundary distance sampled at every occupied cell center.

    Parameters
    ----------
    polygon : FootprintPolygon
    grid : RasterGrid
        Raster produced from the same polygon.

    Returns
    -------
    DistanceField
    """
    if grid.bits.size == 0 or not grid.bits.any():
        raise InputError("empty grid: nothing to measure")
    iy, ix = np.nonzero(grid.bits)
    x, y = grid.cell_to_world(iy, ix)
    a, b = polygon.edges()
    d = min_edge_distance(x, y, a[:, 0], a[:, 1], b[:, 0], b[:, 1])
    values = np.zeros(grid.bits.shape, dtype=float)
    values[iy, ix] = d
    return DistanceField(grid=grid, values=values,
                         polygon_id=polygon.name, polygon=polygon)
