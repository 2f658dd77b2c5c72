"""Independent reference computations the tests check against.

Everything here goes out of its way to avoid the package's own numerics:
distances are brute-force loops over edges, side lengths come from adaptive
scipy quadrature with an explicit regularizing substitution, and contour
references come from scikit-image marching squares on a scipy distance
transform.
"""

import numpy as np
from scipy import integrate

# Prevertex half-angle of the short side for a centered 2:1 rectangle,
# solved to 40 digits with mpmath (tanh-sinh arc integrals + findroot on
# the side-length ratio): prevertices at t0, pi-t0, pi+t0, 2pi-t0.
RECT_2TO1_T0 = 0.1724259977128490661853879959981020253


def point_segment_distance(p, a, b):
    ab = b - a
    t = float(np.dot(p - a, ab)) / max(float(np.dot(ab, ab)), 1e-300)
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(a + t * ab - p)))


def boundary_distance_bruteforce(points, vertices):
    """Min distance from each point to any polygon edge, by plain loops."""
    n = vertices.shape[0]
    out = np.empty(points.shape[0])
    for i, p in enumerate(points):
        best = np.inf
        for k in range(n):
            d = point_segment_distance(p, vertices[k], vertices[(k + 1) % n])
            best = min(best, d)
        out[i] = best
    return out


def shoelace_area(vertices):
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def sc_side_lengths(prevertex_angles, betas):
    """|integral of prod (1 - z/z_k)^beta_k dz| along each boundary arc.

    Uses adaptive scipy quadrature after the substitution
    t = a + (b - a) sin^2(u), which cancels both endpoint singularities
    (betas > -1), so this shares no code path with the package quadrature.
    """
    th = np.asarray(prevertex_angles, dtype=float)
    pre = np.exp(1j * th)
    n = th.shape[0]

    def integrand_arc(a, b):
        def fr(u, part):
            t = a + (b - a) * np.sin(u) ** 2
            z = np.exp(1j * t)
            w = np.prod((1.0 - z / pre) ** betas) * 1j * z
            w *= (b - a) * 2.0 * np.sin(u) * np.cos(u)
            return w.real if part == "re" else w.imag

        re, _ = integrate.quad(fr, 0.0, np.pi / 2, args=("re",), limit=200)
        im, _ = integrate.quad(fr, 0.0, np.pi / 2, args=("im",), limit=200)
        return complex(re, im)

    lengths = np.empty(n)
    for k in range(n):
        a = th[k]
        b = th[(k + 1) % n] if k + 1 < n else th[0] + 2.0 * np.pi
        lengths[k] = abs(integrand_arc(a, b))
    return lengths


def hausdorff(points_a, points_b):
    """Symmetric Hausdorff distance between two point sets."""
    d = np.hypot(points_a[:, None, 0] - points_b[None, :, 0],
                 points_a[:, None, 1] - points_b[None, :, 1])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _point_ring_distance(points, ring):
    # Min distance from each point to the closed polyline through ring.
    a = ring
    b = np.roll(ring, -1, axis=0)
    e = b - a
    ee = np.maximum((e * e).sum(axis=1), 1e-300)
    out = np.empty(points.shape[0])
    for i0 in range(0, points.shape[0], 512):
        p = points[i0:i0 + 512]
        t = ((p[:, None, :] - a[None, :, :]) * e[None, :, :]).sum(axis=2)
        t = np.clip(t / ee[None, :], 0.0, 1.0)
        foot = a[None, :, :] + t[..., None] * e[None, :, :]
        gap = p[:, None, :] - foot
        out[i0:i0 + 512] = np.sqrt((gap * gap).sum(axis=2)).min(axis=1)
    return out


def ring_hausdorff(ring_a, ring_b):
    """Symmetric Hausdorff distance between two closed polylines, measured
    curve to curve (vertex spacing does not count against either side)."""
    return float(max(_point_ring_distance(ring_a, ring_b).max(),
                     _point_ring_distance(ring_b, ring_a).max()))


def raster_level_contours(polygon_vertices, level, resolution=512):
    """Reference contour of {x : dist(x, boundary) = level} via scipy EDT
    and skimage marching squares, in world coordinates."""
    from scipy import ndimage
    from skimage import measure

    v = polygon_vertices
    lo = v.min(axis=0)
    hi = v.max(axis=0)
    cell = float((hi - lo).max()) / resolution
    pad = 2
    w = int(np.ceil((hi[0] - lo[0]) / cell)) + 2 * pad
    h = int(np.ceil((hi[1] - lo[1]) / cell)) + 2 * pad
    ox, oy = lo[0] - pad * cell, lo[1] - pad * cell
    ys, xs = np.mgrid[0:h, 0:w]
    px = ox + (xs + 0.5) * cell
    py = oy + (ys + 0.5) * cell
    inside = _points_in_polygon(np.c_[px.ravel(), py.ravel()], v)
    occ = inside.reshape(h, w)
    edt = ndimage.distance_transform_edt(occ) * cell
    segs = measure.find_contours(edt, level)
    out = []
    for seg in segs:
        wx = ox + (seg[:, 1] + 0.5) * cell
        wy = oy + (seg[:, 0] + 0.5) * cell
        out.append(np.c_[wx, wy])
    return out


def skeleton_graph_counts(cells):
    """(branch count, junction-cluster count) of a thin mask, by plain BFS.

    Junction cells have >= 3 set 8-neighbors; branches are the connected
    components of the remaining cells. No scipy/package code involved.
    """
    cells = np.asarray(cells, dtype=bool)
    h, w = cells.shape
    offs = [(-1, -1), (-1, 0), (-1, 1), (0, -1),
            (0, 1), (1, -1), (1, 0), (1, 1)]

    def neighbors(y, x):
        for dy, dx in offs:
            yy, xx = y + dy, x + dx
            if 0 <= yy < h and 0 <= xx < w and cells[yy, xx]:
                yield yy, xx

    deg = {}
    for y in range(h):
        for x in range(w):
            if cells[y, x]:
                deg[(y, x)] = sum(1 for _ in neighbors(y, x))

    def components(nodes):
        nodes = set(nodes)
        comps = 0
        while nodes:
            comps += 1
            stack = [nodes.pop()]
            while stack:
                y, x = stack.pop()
                for q in neighbors(y, x):
                    if q in nodes:
                        nodes.remove(q)
                        stack.append(q)
        return comps

    junction_cells = [c for c, d in deg.items() if d >= 3]
    branch_cells = [c for c, d in deg.items() if d < 3]
    return components(branch_cells), components(junction_cells)


def _points_in_polygon(points, vertices):
    # Even-odd rule, vectorized over points only.
    x, y = points[:, 0], points[:, 1]
    n = vertices.shape[0]
    inside = np.zeros(points.shape[0], dtype=bool)
    for k in range(n):
        x1, y1 = vertices[k]
        x2, y2 = vertices[(k + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < np.where(crosses, xi, np.inf))
    return inside
