"""Pure-NumPy reference implementations of the hot kernels.

These are the semantic ground truth: the compiled core must match
``sc_segment_integrals`` and ``min_edge_distance`` to floating-point noise
and ``thin_skeleton`` exactly (same heap ordering, same cell set).
"""

import heapq

import numpy as np

# 8-neighborhood offsets; bit i of a neighbor code corresponds to _OFFS[i].
_OFFS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def sc_segment_integrals(za, zb, sing, prevertices, betas,
                         jac_nodes, jac_weights, leg_nodes, leg_weights,
                         max_panels=200):
    """Integrate prod_k (1 - z/z_k)^beta_k along straight segments.

    Parameters
    ----------
    za, zb : complex arrays, shape (m,)
        Segment endpoints inside the closed unit disk.
    sing : int array, shape (m,)
        Index of the prevertex sitting exactly at ``za`` (absorbed into the
        Gauss-Jacobi weight of the first panel), or -1 for a regular start.
    prevertices : complex array, shape (n,)
    betas : float array, shape (n,)
        Exterior turning exponents alpha_k - 1.
    jac_nodes, jac_weights : float arrays, shape (n, q)
        Gauss-Jacobi rules with weight (1+x)^beta_k, one row per prevertex.
    leg_nodes, leg_weights : float arrays, shape (q,)
        Gauss-Legendre rule for panels without an endpoint singularity.
    max_panels : int
        Safety bound on compound-rule subdivisions per segment.

    Returns
    -------
    complex array, shape (m,)

    Notes
    -----
    Panels follow the one-half rule: each panel extends from the current
    endpoint by at most twice the distance to the nearest non-absorbed
    prevertex, so no panel endpoint lies within half the panel length of a
    singularity. All segments advance one panel per round, which keeps the
    work vectorized across the batch.
    """
    z = np.asarray(prevertices, dtype=complex)
    betas = np.asarray(betas, dtype=float)
    za = np.asarray(za, dtype=complex)
    zb = np.asarray(zb, dtype=complex)
    sing = np.asarray(sing, dtype=np.int64)

    m = za.shape[0]
    total = np.zeros(m, dtype=complex)
    seg = zb - za
    rem = np.abs(seg)
    unit = np.ones(m, dtype=complex)
    nz = rem > 0.0
    unit[nz] = seg[nz] / rem[nz]

    cur = za.copy()
    absorbed = sing.copy()
    active = nz.copy()

    for _ in range(max_panels):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        c = cur[idx]
        u = unit[idx]
        r = rem[idx]
        ab = absorbed[idx]

        dist = np.abs(z[None, :] - c[:, None])
        has_ab = ab >= 0
        if has_ab.any():
            dist[np.flatnonzero(has_ab), ab[has_ab]] = np.inf
        half = np.minimum(r, 2.0 * dist.min(axis=1))

        nodes = np.where(has_ab[:, None], jac_nodes[ab], leg_nodes[None, :])
        weights = np.where(has_ab[:, None], jac_weights[ab], leg_weights[None, :])

        # Points of this panel: map [-1, 1] onto [c, c + half*u].
        pts = c[:, None] + (nodes + 1.0) * (0.5 * half * u)[:, None]

        logs = np.log(1.0 - pts[:, :, None] / z[None, None, :])
        if has_ab.any():
            logs[np.flatnonzero(has_ab), :, ab[has_ab]] = 0.0
        vals = np.exp(logs @ betas)

        panel = (weights * vals).sum(axis=1) * (0.5 * half * u)
        if has_ab.any():
            j = np.flatnonzero(has_ab)
            k = ab[has_ab]
            # The absorbed factor (1 - zeta/z_k)^beta splits into the rule
            # weight (1+x)^beta times this panel-level constant.
            pref = np.exp(betas[k] * np.log(-(half[j] * u[j]) / (2.0 * z[k])))
            panel[j] *= pref

        total[idx] += panel
        cur[idx] = c + half * u
        rem[idx] = r - half
        absorbed[idx] = -1
        active[idx] = rem[idx] > 1e-15 * np.abs(seg[idx])

    return total


def min_edge_distance(px, py, ax, ay, bx, by):
    """Exact minimum distance from each point to a set of segments.

    Parameters
    ----------
    px, py : float arrays, shape (m,)
    ax, ay, bx, by : float arrays, shape (e,)
        Segment endpoints.

    Returns
    -------
    float array, shape (m,)
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    ex = np.asarray(bx, dtype=float) - ax
    ey = np.asarray(by, dtype=float) - ay
    ee = ex * ex + ey * ey
    ee = np.where(ee > 0.0, ee, 1.0)

    out = np.empty(px.shape[0], dtype=float)
    chunk = 65536
    for lo in range(0, px.shape[0], chunk):
        hi = min(lo + chunk, px.shape[0])
        dx = px[lo:hi, None] - ax[None, :]
        dy = py[lo:hi, None] - ay[None, :]
        t = np.clip((dx * ex + dy * ey) / ee, 0.0, 1.0)
        rx = dx - t * ex
        ry = dy - t * ey
        out[lo:hi] = np.sqrt(np.min(rx * rx + ry * ry, axis=1))
    return out


def _code(occ, y, x):
    h, w = occ.shape
    code = 0
    for i, (dy, dx) in enumerate(_OFFS):
        yy = y + dy
        xx = x + dx
        if 0 <= yy < h and 0 <= xx < w and occ[yy, xx]:
            code |= 1 << i
    return code


def thin_skeleton(occ, dist, anchors, lut):
    """Distance-ordered homotopic thinning down to a one-cell-wide skeleton.

    Parameters
    ----------
    occ : uint8 array, shape (h, w)
        Occupancy mask; not modified.
    dist : float array, shape (h, w)
        Distance ordering key (cells removed shallow-first).
    anchors : uint8 array, shape (h, w)
        Cells that stage one must keep (centers of maximal balls after tie
        resolution).
    lut : uint8 array, shape (256,)
        Simple-point table over the 8-neighbor code.

    Returns
    -------
    uint8 array, shape (h, w)

    Notes
    -----
    Stage one removes non-anchor simple cells in (dist, y, x) order, which
    keeps the result centered. Stage two removes remaining simple cells with
    two or more neighbors, erasing anchor ridges that stage one routed
    around while preserving branch endpoints. Both stages re-examine the
    neighbors of every removed cell, so the result is stable under re-runs.
    """
    occ = occ.astype(np.uint8).copy()
    h, w = occ.shape

    heap = []
    ys, xs = np.nonzero(occ & ~anchors.astype(bool))
    for y, x in zip(ys.tolist(), xs.tolist()):
        heapq.heappush(heap, (float(dist[y, x]), y, x))
    while heap:
        _, y, x = heapq.heappop(heap)
        if not occ[y, x] or anchors[y, x]:
            continue
        if not lut[_code(occ, y, x)]:
            continue
        occ[y, x] = 0
        for dy, dx in _OFFS:
            yy = y + dy
            xx = x + dx
            if 0 <= yy < h and 0 <= xx < w and occ[yy, xx] and not anchors[yy, xx]:
                heapq.heappush(heap, (float(dist[yy, xx]), yy, xx))

    heap = []
    ys, xs = np.nonzero(occ)
    for y, x in zip(ys.tolist(), xs.tolist()):
        heapq.heappush(heap, (float(dist[y, x]), y, x))
    while heap:
        _, y, x = heapq.heappop(heap)
        if not occ[y, x]:
            continue
        code = _code(occ, y, x)
        if bin(code).count("1") < 2:
            continue
        if not lut[code]:
            continue
        occ[y, x] = 0
        for dy, dx in _OFFS:
            yy = y + dy
            xx = x + dx
            if 0 <= yy < h and 0 <= xx < w and occ[yy, xx]:
                heapq.heappush(heap, (float(dist[yy, xx]), yy, xx))

    return occ
