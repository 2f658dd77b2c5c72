"""Nested ribbon layouts.

Level curves of the footprint's interior clearance (distance to the real
boundary) are traced per subregion by radial root finding in map
coordinates: each disk ray is scanned outside-in for the outermost distance
crossing, so the curve hugging a facade is found even when deeper parts of
the ray dip back below the level. Rays leaving a subregion through a
cutline carry no root across the gap; the curve instead meets the cutline
at matching points solved directly on the cut segment, which both adjacent
subregions reproduce bit for bit, making the stitched curves watertight.

One root per ray cannot see curve stretches the rays cross more than once;
behind a cut window the clearance of the far side shines through and bends
the curve into an arc around the reflex corner, which is exactly such a
pocket. Any anomalously long jump between neighbouring chain samples is
therefore retraced along the curve itself with a tangent walk corrected by
Newton steps on the clearance.

Cells are wall-to-wall sectors of the band between consecutive levels.
Walls stand only where two different facades of the original footprint
meet; fans next to a cut endpoint therefore dissolve into the facade the
endpoint lies on, and cell fragments split by a cutline are spliced back
into one polygon per (ribbon, facade) pair.
"""

import numpy as np
from dataclasses import dataclass, field
from scipy import optimize

from .errors import InputError, LayoutError, StitchError
from .geometry import FootprintPolygon, rasterize, distance_field
from .scmap import boundary_inverse, map_forward

_WINDOW_JITTER = (2.5e-4, 1e-3, 4e-3, 1.6e-2)


@dataclass
class Chain:
    """One connected run of level-curve samples inside a subregion."""
    facade: int
    pts: np.ndarray
    start_kind: str = "wall"
    end_kind: str = "wall"
    start_window: str = None
    end_window: str = None
    start_gap: float = None
    end_gap: float = None
    cyclic: bool = False


@dataclass
class SectorCurve:
    """Radial wall between two facades of one subregion.

    ``points`` runs from the boundary break vertex inward through the wall
    ray's root at every level.
    """
    node_id: str
    facade_left: int
    facade_right: int
    theta: float
    points: np.ndarray


@dataclass
class Contour:
    """A stitched closed level curve with per-subregion provenance."""
    level: float
    points: np.ndarray
    segments: list


@dataclass
class LayoutCell:
    """One (ribbon, facade) sector, possibly spliced across cutlines.

    ``polygon`` is ``outer`` followed by ``inner`` reversed, so the first
    ``outer_count`` ring vertices trace the cell's outer arc in boundary
    order; renderers rely on that for arc-length splits.
    """
    ribbon: int
    facade: int
    outer: np.ndarray
    inner: np.ndarray
    nodes: tuple

    @property
    def polygon(self):
        ring = _dedupe_ring(np.vstack([self.outer, self.inner[::-1]]))
        return ring if _ring_area(ring) >= 0 else ring[::-1]

    @property
    def outer_count(self):
        return self.outer.shape[0]


@dataclass
class LevelSolve:
    """Per-subregion radial solve: rays, roots and chain structure."""
    node_id: str
    diskmap: object
    theta: np.ndarray
    wall_mask: np.ndarray
    windows: list
    levels: np.ndarray
    root_rho: np.ndarray
    root_w: np.ndarray
    chains: list = field(default_factory=list)
    boundary_chains: list = field(default_factory=list)
    walls: list = field(default_factory=list)
    crossings: dict = field(default_factory=dict)
    hole_count: int = 0


@dataclass
class RibbonLayout:
    """Complete lens geometry for one footprint."""
    footprint: FootprintPolygon
    nodes: list
    levels: np.ndarray
    depth: float
    contours: list
    cells: list
    sectors: list
    core: list
    warnings: list
    n_ribbons: int


def _is_cut(edge_id):
    return isinstance(edge_id, str)


def _cut_max_distance(footprint, endpoints):
    p0 = np.asarray(endpoints[0], dtype=float)
    p1 = np.asarray(endpoints[1], dtype=float)

    def clearance(s):
        pt = p0 + s * (p1 - p0)
        return float(footprint.boundary_distance(pt[None, :])[0])

    s = np.linspace(0.0, 1.0, 1025)
    pts = p0[None, :] + s[:, None] * (p1 - p0)[None, :]
    d = footprint.boundary_distance(pts)
    i = int(np.argmax(d))
    lo = s[max(i - 1, 0)]
    hi = s[min(i + 1, s.shape[0] - 1)]
    res = optimize.minimize_scalar(lambda t: -clearance(t), bounds=(lo, hi),
                                   method="bounded",
                                   options={"xatol": 1e-12})
    return max(float(d[i]), float(-res.fun))


def _deepest_clearance(footprint, node_polygon, center):
    # Clearance at the subregion's map center; every ray from the center
    # must cross each level once, so this bounds the usable depth.
    c = np.array([center.real, center.imag])
    return float(footprint.boundary_distance(c[None, :])[0])


def depth_schedule(footprint, nodes, maps, cutlines, n_ribbons):
    """Common ribbon depth D and the level distances D*i/n.

    D is 90% of the binding clearance: the shallowest subregion center and
    the shallowest cutline maximum, whichever is smaller. Below that depth
    every level curve crosses every cutline and closes around every
    subregion center.
    """
    if n_ribbons < 1:
        raise InputError("at least one ribbon is required")
    cap = np.inf
    for node in nodes:
        dm = maps[node.id]
        cap = min(cap, _deepest_clearance(footprint, node.polygon, dm.center))
    for cut in cutlines:
        cap = min(cap, _cut_max_distance(footprint, cut.endpoints))
    if not np.isfinite(cap) or cap <= 0.0:
        raise LayoutError("footprint has no usable interior depth")
    depth = 0.9 * cap
    levels = depth * np.arange(1, n_ribbons + 1) / n_ribbons
    return depth, levels


def _ring_specials(polygon, dm):
    # Walls: vertices where two different real facades meet. Windows: cut
    # edges, as CCW angle intervals on the map circle.
    v = polygon.vertices
    ids = list(polygon.facade_ids)
    n = v.shape[0]
    wall_pts, wall_pairs = [], []
    windows = []
    for k in range(n):
        prev_id = ids[(k - 1) % n]
        if (not _is_cut(prev_id)) and (not _is_cut(ids[k])) \
                and prev_id != ids[k]:
            wall_pts.append(v[k])
            wall_pairs.append((int(prev_id), int(ids[k])))
        if _is_cut(ids[k]):
            windows.append({"cut": ids[k], "p0": v[k], "p1": v[(k + 1) % n]})
    angles = []
    if wall_pts:
        zs = boundary_inverse(dm, np.array([complex(p[0], p[1])
                                            for p in wall_pts]))
        angles = list(np.angle(zs) % (2.0 * np.pi))
    for w in windows:
        zz = boundary_inverse(dm, np.array([complex(*w["p0"]),
                                            complex(*w["p1"])]))
        t0, t1 = np.angle(zz) % (2.0 * np.pi)
        w["theta0"] = float(t0)
        w["width"] = float((t1 - t0) % (2.0 * np.pi))
    walls = [{"point": np.asarray(p, dtype=float), "theta": float(a),
              "left": pr[0], "right": pr[1]}
             for p, a, pr in zip(wall_pts, angles, wall_pairs)]
    return walls, windows


def _in_window(theta, window, margin=1e-9):
    rel = (theta - window["theta0"]) % (2.0 * np.pi)
    return margin < rel < window["width"] - margin


def _ray_angles(dm, walls, windows, n_rays):
    base = list(np.linspace(0.0, 2.0 * np.pi, n_rays, endpoint=False))
    specials = [w["theta"] for w in walls]
    for w in windows:
        for edge in (w["theta0"], (w["theta0"] + w["width"]) % (2 * np.pi)):
            specials.append(edge % (2.0 * np.pi))
            for d in _WINDOW_JITTER:
                specials.append((edge + d) % (2.0 * np.pi))
                specials.append((edge - d) % (2.0 * np.pi))
    specials.extend(dm.prevertex_angles % (2.0 * np.pi))
    specials = np.array(specials)
    base = np.array(base)
    near = np.min(np.abs(base[:, None] - specials[None, :]) % (2 * np.pi),
                  axis=1)
    near = np.minimum(near, 2 * np.pi - near)
    theta = np.sort(np.concatenate([base[near > 1e-9], specials]))
    keep = np.ones(theta.shape[0], dtype=bool)
    keep[1:] = np.diff(theta) > 1e-12
    theta = theta[keep]
    wall_mask = np.zeros(theta.shape[0], dtype=bool)
    for w in walls:
        wall_mask[int(np.argmin(np.abs(theta - w["theta"])))] = True
    return theta, wall_mask


def _edge_id_at(polygon, pt):
    v = polygon.vertices
    e = np.roll(v, -1, axis=0) - v
    rel = pt[None, :] - v
    t = np.clip((rel * e).sum(axis=1) / (e * e).sum(axis=1), 0.0, 1.0)
    foot = v + t[:, None] * e
    k = int(np.argmin(np.hypot(*(pt[None, :] - foot).T)))
    return polygon.facade_ids[k]


def _window_fallback_id(polygon, window, low_side):
    # A chain living entirely inside a cut window borrows the facade of the
    # real edge adjacent to the nearer cut endpoint.
    v = polygon.vertices
    ids = list(polygon.facade_ids)
    n = v.shape[0]
    anchor = window["p0"] if low_side else window["p1"]
    hit = int(np.argmin(np.hypot(*(v - anchor[None, :]).T)))
    cand = ids[(hit - 1) % n] if low_side else ids[hit % n]
    if _is_cut(cand):
        cand = ids[hit % n] if low_side else ids[(hit - 1) % n]
    if _is_cut(cand):
        raise LayoutError("cut window has no adjacent facade")
    return int(cand)


def level_set(polygon, dm, footprint, levels, n_rays=720):
    """Trace every level curve of one subregion by radial bisection.

    Parameters
    ----------
    polygon : FootprintPolygon
        The subregion ring, cut edges carrying string ids.
    dm : DiskMap
        Solved map for the subregion.
    footprint : FootprintPolygon
        The full footprint; level curves follow ITS clearance so cutlines
        leave no trace in the geometry.
    levels : array of float
        Strictly positive increasing clearance values, all below the
        depth_schedule cap.
    n_rays : int
        Uniform ray count; wall, corner and cut-window rays are added.

    Returns
    -------
    LevelSolve
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0 or levels.min() <= 0.0:
        raise InputError("level distances must be positive; the zero level "
                         "is the boundary polygon itself")
    walls, windows = _ring_specials(polygon, dm)
    theta, wall_mask = _ray_angles(dm, walls, windows, n_rays)
    nray = theta.shape[0]
    nlev = levels.shape[0]

    u = np.linspace(0.0, 1.0, 40)
    rho_samples = 1.0 - u * u
    zgrid = rho_samples[None, :] * np.exp(1j * theta)[:, None]
    wgrid = map_forward(dm, zgrid.ravel()).reshape(nray, rho_samples.shape[0])
    pts = np.column_stack([wgrid.real.ravel(), wgrid.imag.ravel()])
    dist = footprint.boundary_distance(pts).reshape(nray, -1)

    root_rho = np.full((nlev, nray), np.nan)
    root_w = np.full((nlev, nray), np.nan + 0j, dtype=complex)
    eiθ = np.exp(1j * theta)
    for li, d in enumerate(levels):
        gpos = dist > d
        first = np.argmax(gpos, axis=1)
        ok = gpos.any(axis=1) & (first >= 1)
        lo = np.where(ok, rho_samples[first], 0.0)
        hi = np.where(ok, rho_samples[np.maximum(first - 1, 0)], 1.0)
        act = np.flatnonzero(ok)
        a = lo[act].copy()
        b = hi[act].copy()
        for _ in range(34):
            mid = 0.5 * (a + b)
            wm = map_forward(dm, mid * eiθ[act])
            gm = footprint.boundary_distance(
                np.column_stack([wm.real, wm.imag])) > d
            a = np.where(gm, mid, a)
            b = np.where(gm, b, mid)
        rho = 0.5 * (a + b)
        root_rho[li, act] = rho
        root_w[li, act] = map_forward(dm, rho * eiθ[act])

    solve = LevelSolve(node_id=polygon.name, diskmap=dm, theta=theta,
                       wall_mask=wall_mask, windows=windows, levels=levels,
                       root_rho=root_rho, root_w=root_w)
    solve.walls = walls
    avoid = list(dm.prevertex_angles % (2.0 * np.pi))
    for w in windows:
        avoid.append(w["theta0"])
        avoid.append((w["theta0"] + w["width"]) % (2.0 * np.pi))
    solve._avoid = np.array(avoid)
    ea, eb = footprint.edges()
    solve._gap_step = float(np.hypot(*(eb - ea).T).sum()) / n_rays
    _solve_crossings(solve, polygon, footprint)
    for li in range(nlev):
        solve.chains.append(_build_chains(solve, polygon, footprint, li))
    solve.boundary_chains = _boundary_chains(polygon, walls)
    for w in walls:
        i = int(np.argmin(np.abs(theta - w["theta"])))
        col = root_w[:, i]
        pts = np.vstack([w["point"][None, :],
                         np.column_stack([col.real, col.imag])])
        solve.sector_curves = getattr(solve, "sector_curves", [])
        solve.sector_curves.append(SectorCurve(
            node_id=polygon.name, facade_left=w["left"],
            facade_right=w["right"], theta=w["theta"], points=pts))
    return solve


def _solve_crossings(solve, polygon, footprint):
    # Matching points: where each level crosses each cut edge.  The two
    # adjacent subregions traverse the shared segment in opposite ring
    # directions, so the roots are solved on a canonically oriented copy;
    # both sides then produce bit-identical coordinates.
    for w in solve.windows:
        p0 = np.asarray(w["p0"], dtype=float)
        p1 = np.asarray(w["p1"], dtype=float)
        flipped = tuple(p1) < tuple(p0)
        if flipped:
            p0, p1 = p1, p0
        s = np.linspace(0.0, 1.0, 129)
        seg = p0[None, :] + s[:, None] * (p1 - p0)[None, :]
        d_along = footprint.boundary_distance(seg)

        def g_factory(level):
            def g(t):
                pt = p0 + t * (p1 - p0)
                return float(footprint.boundary_distance(pt[None, :])[0]) \
                    - level
            return g

        for li, d in enumerate(solve.levels):
            gs = d_along - d
            roots = []
            for j in range(s.shape[0] - 1):
                if gs[j] == 0.0:
                    roots.append(s[j])
                elif gs[j] * gs[j + 1] < 0.0:
                    roots.append(optimize.brentq(g_factory(d), s[j], s[j + 1],
                                                 xtol=1e-14))
            roots = np.array(roots)
            pts = (p0[None, :]
                   + roots[:, None] * (p1 - p0)[None, :]).reshape(-1, 2)
            if flipped:
                # Back to this node's own traversal order for the angular
                # pairing; the coordinates themselves stay untouched.
                roots, pts = 1.0 - roots[::-1], pts[::-1]
            solve.crossings[(w["cut"], li)] = {"s": roots, "points": pts}


def _build_chains(solve, polygon, footprint, li):
    theta = solve.theta
    nray = theta.shape[0]
    has = ~np.isnan(solve.root_rho[li])
    if not has.any():
        raise LayoutError(f"level {solve.levels[li]:.6g} vanished in "
                          f"subregion {polygon.name}")
    w = solve.root_w[li]

    if has.all() and not solve.wall_mask.any():
        pts = np.column_stack([w.real, w.imag])
        ring = [Chain(facade=int(polygon.facade_ids[0]), pts=pts,
                      cyclic=True, start_kind="loop", end_kind="loop")]
        _refine_chain_gaps(footprint, ring, solve.levels[li],
                           solve._gap_step)
        return ring

    # Split the cyclic ray order into chains at rootless gaps and walls.
    start = None
    for i in range(nray):
        if not has[i]:
            start = (i, "gap")
            break
    if start is None:
        for i in range(nray):
            if solve.wall_mask[i]:
                start = (i, "wall")
                break
    i0, _ = start
    order = [(i0 + k) % nray for k in range(nray + 1)]

    raw = []
    cur = []
    for pos, i in enumerate(order):
        if not has[i]:
            if cur:
                raw.append(cur)
                cur = []
            continue
        cur.append(i)
        if solve.wall_mask[i] and len(cur) > 1 and pos < nray:
            raw.append(cur)
            cur = [i]
    if cur:
        raw.append(cur)

    chains = []
    for idx in raw:
        if len(idx) < 2 and not solve.wall_mask[idx[0]]:
            # lone sample between two gaps: too thin to matter
            solve.hole_count += 1
            continue
        pts = np.column_stack([w[idx].real, w[idx].imag])
        ch = Chain(facade=-1, pts=pts)
        ch._rays = np.array(idx)
        first, last = idx[0], idx[-1]
        ch.start_kind = "wall" if solve.wall_mask[first] else "gap"
        ch.end_kind = "wall" if solve.wall_mask[last] else "gap"
        ch.start_gap = theta[(first - 1) % nray]
        ch.end_gap = theta[(last + 1) % nray]
        chains.append(ch)

    for ch in chains:
        for side in ("start", "end"):
            if getattr(ch, side + "_kind") != "gap":
                continue
            gap_theta = getattr(ch, side + "_gap")
            win = next((w_ for w_ in solve.windows
                        if _in_window(gap_theta, w_)), None)
            if win is None:
                setattr(ch, side + "_kind", "hole")
                solve.hole_count += 1
            else:
                setattr(ch, side + "_kind", "cut")
                setattr(ch, side + "_window", win["cut"])

    _heal_holes(chains)
    _assign_facades(solve, polygon, chains)
    _attach_crossings(solve, polygon, chains, li)
    _insert_offset_corners(footprint, polygon, chains, solve.levels[li])
    _refine_chain_gaps(footprint, chains, solve.levels[li], solve._gap_step)
    return chains


def _heal_holes(chains):
    # Bridge numerical bracket failures on real boundary: merge adjacent
    # chains whose facing ends both fell into a non-window gap.
    i = 0
    while i < len(chains) - 1:
        a, b = chains[i], chains[i + 1]
        if a.end_kind == "hole" and b.start_kind == "hole":
            a.pts = np.vstack([a.pts, b.pts])
            a._rays = np.concatenate([a._rays, b._rays])
            a.end_kind = b.end_kind
            a.end_window = b.end_window
            a.end_gap = b.end_gap
            del chains[i + 1]
        else:
            i += 1


def _assign_facades(solve, polygon, chains):
    dm = solve.diskmap
    avoid = getattr(solve, "_avoid", np.empty(0))
    for ch in chains:
        picked = None
        for i in ch._rays:
            th = solve.theta[i]
            if solve.wall_mask[i]:
                continue
            if avoid.size and np.min(np.abs(avoid - th)) < 1e-8:
                continue
            if any(_in_window(th, w_) for w_ in solve.windows):
                continue
            picked = th
            break
        if picked is not None:
            exit_pt = map_forward(dm, np.exp(1j * picked))
            fid = _edge_id_at(polygon, np.array([exit_pt.real, exit_pt.imag]))
            if not _is_cut(fid):
                ch.facade = int(fid)
                continue
        win = next((w_ for w_ in solve.windows
                    if w_["cut"] == (ch.start_window or ch.end_window)), None)
        if win is None:
            raise LayoutError("could not attribute a facade to a level chain")
        ch.facade = _window_fallback_id(polygon, win,
                                        low_side=ch.end_kind == "cut")


def _attach_crossings(solve, polygon, chains, li):
    # Pair chain ends pointing into each window with the solved matching
    # points, in angular order.
    for w in solve.windows:
        entries = []
        for ch in chains:
            if ch.start_kind == "cut" and ch.start_window == w["cut"]:
                rel = (ch.start_gap - w["theta0"]) % (2.0 * np.pi)
                entries.append((rel, ch, "start"))
            if ch.end_kind == "cut" and ch.end_window == w["cut"]:
                rel = (ch.end_gap - w["theta0"]) % (2.0 * np.pi)
                entries.append((rel, ch, "end"))
        cross = solve.crossings[(w["cut"], li)]
        if len(entries) != cross["points"].shape[0]:
            raise StitchError(
                f"cut {w['cut']}: {len(entries)} curve ends meet "
                f"{cross['points'].shape[0]} crossings at level "
                f"{solve.levels[li]:.6g}", edge=w["cut"],
                d_w=float(solve.levels[li]))
        entries.sort(key=lambda e: e[0])
        for (rel, ch, side), pt in zip(entries, cross["points"]):
            if side == "start":
                ch.pts = np.vstack([pt[None, :], ch.pts])
            else:
                ch.pts = np.vstack([ch.pts, pt[None, :]])


def _wall_offset_corners(polygon):
    # The level curve of a polygon's clearance is an offset polyline: under
    # every convex facade break it has an exact corner where the two edge
    # offsets meet. Returns (vertex, direction) with corner = v + d * dir.
    v = polygon.vertices
    ids = list(polygon.facade_ids)
    n = v.shape[0]
    out = []
    for k in range(n):
        prev_id, this_id = ids[(k - 1) % n], ids[k]
        if _is_cut(prev_id) or _is_cut(this_id) or prev_id == this_id:
            continue
        u1 = v[k] - v[(k - 1) % n]
        u2 = v[(k + 1) % n] - v[k]
        u1 = u1 / np.hypot(*u1)
        u2 = u2 / np.hypot(*u2)
        if u1[0] * u2[1] - u1[1] * u2[0] <= 1e-12:
            # reflex or straight break: the offset turns smoothly
            continue
        n1 = np.array([-u1[1], u1[0]])
        n2 = np.array([-u2[1], u2[0]])
        out.append((v[k], (n1 + n2) / (1.0 + float(n1 @ n2))))
    return out


def _insert_offset_corners(footprint, polygon, chains, level):
    # Ray samples straddle each offset corner without hitting it; splice
    # the exact corner into whichever chain segment passes closest.
    for vertex, direction in _wall_offset_corners(polygon):
        kink = vertex + level * direction
        d_true = float(footprint.boundary_distance(kink[None, :])[0])
        if abs(d_true - level) > 1e-9 * footprint.diameter():
            # another boundary feature is closer: this corner of the
            # two-edge offset is not part of the actual level curve
            continue
        best = (np.inf, None, None)
        for ch in chains:
            pts = ch.pts
            if pts.shape[0] < 2:
                continue
            a, b = pts[:-1], pts[1:]
            e = b - a
            ee = np.maximum((e * e).sum(axis=1), 1e-300)
            t = np.clip(((kink[None, :] - a) * e).sum(axis=1) / ee, 0.0, 1.0)
            foot = a + t[:, None] * e
            d = np.hypot(*(kink[None, :] - foot).T)
            i = int(np.argmin(d))
            if d[i] < best[0]:
                best = (float(d[i]), ch, i)
        gap, ch, i = best
        if ch is None or gap < 1e-12:
            continue
        ch.pts = np.vstack([ch.pts[:i + 1], kink[None, :], ch.pts[i + 1:]])


def _clearance_foot(footprint, p):
    # Nearest boundary point; where it is unique the clearance gradient at
    # p is the unit vector from the foot towards p.
    a, b = footprint.edges()
    e = b - a
    rel = p[None, :] - a
    t = np.clip((rel * e).sum(axis=1) / (e * e).sum(axis=1), 0.0, 1.0)
    foot = a + t[:, None] * e
    d2 = ((p[None, :] - foot) ** 2).sum(axis=1)
    k = int(np.argmin(d2))
    return foot[k], float(np.sqrt(d2[k]))


def _level_tangent(footprint, p, ref, fallback=None):
    # Unit tangent of the level curve at p, signed to follow ref; if ref is
    # (nearly) perpendicular, the chord towards the target breaks the tie.
    foot, d = _clearance_foot(footprint, p)
    g = (p - foot) / d
    t = np.array([-g[1], g[0]])
    s = np.dot(t, ref)
    if fallback is not None and abs(s) < 1e-3 * np.hypot(*ref):
        s = np.dot(t, fallback)
    return t if s >= 0.0 else -t


def _walk_level_gap(footprint, level, a, b, step):
    # Predictor-corrector walk along the clearance level curve from a to b,
    # both already on the curve. Returns the strictly interior fill points.
    tol = 1e-12 * footprint.diameter()
    b = np.asarray(b, dtype=float)

    def project(p):
        for _ in range(12):
            foot, d = _clearance_foot(footprint, p)
            err = d - level
            if abs(err) <= tol:
                break
            p = p - err * (p - foot) / d
        return p

    p = np.array(a, dtype=float)
    # First step along the chord: the tangent at a corner or crossing point
    # can be ambiguous or perpendicular to the way out.
    t = (b - p) / np.hypot(*(b - p))
    filled = []
    guard = int(40.0 * np.hypot(*(b - p)) / step) + 400
    for _ in range(guard):
        q = project(p + step * t)
        if np.hypot(*(q - p)) < 0.3 * step:
            # Convex corner of the curve: projection cancels the predictor.
            # Aiming straight at the target rounds the turn.
            q = project(p + step * (b - p) / np.hypot(*(b - p)))
        if np.hypot(*(b - q)) <= 0.9 * step:
            return np.array(filled).reshape(-1, 2)
        if np.hypot(*(q - p)) < 0.1 * step:
            break
        p = q
        filled.append(p)
        t = _level_tangent(footprint, p, t, fallback=b - p)
    raise LayoutError(f"level {level:.6g} curve walk from {a} "
                      f"did not reach {b}")


def _refine_chain_gaps(footprint, chains, level, step):
    # Fill every inter-sample jump longer than two nominal spacings by
    # walking the curve; pockets invisible to the radial scan (and the
    # sparse stretches next to window edges) become ordinary samples.
    trigger = 2.0 * step
    for ch in chains:
        pts = ch.pts
        n = pts.shape[0]
        pairs = [(i - 1, i) for i in range(1, n)]
        if ch.cyclic and n > 2:
            pairs.append((n - 1, 0))
        out = [pts[:1]]
        for i, j in pairs:
            if np.hypot(*(pts[j] - pts[i])) > trigger:
                fill = _walk_level_gap(footprint, level, pts[i], pts[j], step)
                if fill.size:
                    out.append(fill)
            if j:
                out.append(pts[j][None, :])
        ch.pts = np.vstack(out)


def _boundary_chains(polygon, walls):
    # Level-0 chains: actual boundary runs between walls and cut edges.
    v = polygon.vertices
    ids = list(polygon.facade_ids)
    n = v.shape[0]
    wall_set = set()
    for w in walls:
        wall_set.add(int(np.argmin(np.hypot(*(v - w["point"][None, :]).T))))

    def is_break(k):
        return k in wall_set or _is_cut(ids[(k - 1) % n]) or _is_cut(ids[k])

    start = next((k for k in range(n) if is_break(k)), None)
    chains = []
    if start is None:
        pts = np.vstack([v, v[:1]])
        return [Chain(facade=int(ids[0]), pts=pts, cyclic=True,
                      start_kind="loop", end_kind="loop")]
    k = start
    for _ in range(n):
        if _is_cut(ids[k]):
            k = (k + 1) % n
            if k == start:
                break
            continue
        run = [k]
        j = k
        while True:
            j = (j + 1) % n
            run.append(j)
            if is_break(j) or j == start:
                break
            if _is_cut(ids[j]):
                break
        pts = v[run]
        ch = Chain(facade=int(ids[k]), pts=pts.astype(float))
        ch.start_kind = "wall" if k in wall_set else "cut"
        ch.end_kind = "wall" if run[-1] in wall_set else "cut"
        if ch.start_kind == "cut":
            ch.start_window = ids[(k - 1) % n]
        if ch.end_kind == "cut":
            ch.end_window = ids[run[-1] % n]
        chains.append(ch)
        k = run[-1]
        if k == start:
            break
    return chains


def _link_loops(chain_list):
    # Join chains end-to-start on exact shared endpoints into closed loops.
    unused = list(range(len(chain_list)))
    loops = []
    while unused:
        i = unused.pop(0)
        node_id, ch = chain_list[i]
        pts = [ch.pts]
        segs = [(node_id, ch.facade, 0, ch.pts.shape[0])]
        if ch.cyclic:
            loops.append((np.vstack(pts), segs))
            continue
        head = ch.pts[0]
        tail = ch.pts[-1]
        guard = 0
        while not np.array_equal(head, tail):
            guard += 1
            if guard > len(chain_list) + 1:
                raise StitchError("level curve failed to close", edge="?",
                                  d_w=float("nan"))
            found = None
            for j in unused:
                cand = chain_list[j][1]
                if np.array_equal(cand.pts[0], tail):
                    found = j
                    break
            if found is None:
                # tolerate tiny drift: nearest start point
                best, bd = None, np.inf
                for j in unused:
                    d = np.hypot(*(chain_list[j][1].pts[0] - tail))
                    if d < bd:
                        best, bd = j, d
                if best is None or bd > 1e-6:
                    raise StitchError(
                        f"level curve gap of {bd:.3e} at {tail}", edge="?",
                        d_w=float("nan"))
                found = best
            unused.remove(found)
            nid, nxt = chain_list[found]
            off = sum(p.shape[0] - 1 for p in pts)
            pts.append(nxt.pts[1:] if np.allclose(nxt.pts[0], tail)
                       else nxt.pts)
            segs.append((nid, nxt.facade, off, off + nxt.pts.shape[0] - 1))
            tail = nxt.pts[-1]
        loop = np.vstack(pts)
        loops.append((loop[:-1], segs))
    return loops


def stitch(solves, levels, tol=1e-9):
    """Merge matching points across subregions and build global contours.

    Crossings are solved on the shared cut segments, so both sides carry
    identical coordinates; a disagreement beyond ``tol`` (scaled by the
    footprint size) means the partition is inconsistent.
    """
    by_cut = {}
    for sv in solves:
        for (cut, li), cr in sv.crossings.items():
            by_cut.setdefault((cut, li), []).append((sv.node_id, cr))
    for (cut, li), sides in by_cut.items():
        if len(sides) == 1:
            continue
        (na, a), (nb, b) = sides[0], sides[1]
        if a["points"].shape[0] != b["points"].shape[0]:
            raise StitchError(
                f"cut {cut}: {a['points'].shape[0]} vs "
                f"{b['points'].shape[0]} crossings", edge=cut,
                d_w=float(levels[li]))
        if a["points"].size:
            # Each side orders its crossings along its own traversal of the
            # cut; compare order-free.
            pa = a["points"][np.lexsort(a["points"].T)]
            pb = b["points"][np.lexsort(b["points"].T)]
            gap = float(np.max(np.hypot(*(pa - pb).T)))
            if gap > tol:
                raise StitchError(f"cut {cut}: matching points disagree "
                                  f"by {gap:.3e}", edge=cut,
                                  d_w=float(levels[li]))
    contours = []
    nlev = levels.shape[0]
    for li in range(nlev):
        chain_list = []
        for sv in solves:
            for ch in sv.chains[li]:
                chain_list.append((sv.node_id, ch))
        for loop, segs in _link_loops(chain_list):
            contours.append(Contour(level=float(levels[li]), points=loop,
                                    segments=segs))
    return contours


def _link_open(polylines):
    # Chain open polylines end-to-start on exact shared endpoints; returns
    # maximal runs, preserving orientation.
    starts = {tuple(p[0]): i for i, p in enumerate(polylines)}
    end_pts = {tuple(p[-1]) for p in polylines}
    used = [False] * len(polylines)

    def walk(i):
        used[i] = True
        run = [polylines[i]]
        tail = tuple(polylines[i][-1])
        while tail in starts and not used[starts[tail]]:
            j = starts[tail]
            used[j] = True
            run.append(polylines[j][1:])
            tail = tuple(polylines[j][-1])
        return np.vstack(run)

    runs = []
    for i, p in enumerate(polylines):
        if not used[i] and tuple(p[0]) not in end_pts:
            runs.append(walk(i))
    for i in range(len(polylines)):
        if not used[i]:
            runs.append(walk(i))
    return runs


def _merge_cells(cells):
    # Cell fragments split by cutlines share arc endpoints (the matching
    # points) exactly; chaining their outer and inner arcs separately
    # rebuilds one cell per (ribbon, facade) with the cut seam erased.
    out = {}
    for c in cells:
        out.setdefault((c.ribbon, c.facade), []).append(c)
    merged = []
    for key in sorted(out):
        group = out[key]
        nodes = tuple(sorted({n for c in group for n in c.nodes}))
        if len(group) == 1:
            merged.append(group[0])
            continue
        outers = _link_open([c.outer for c in group])
        inners = _link_open([c.inner for c in group])
        if len(outers) != len(inners):
            raise LayoutError(
                f"cell fragments of ribbon {key[0]} facade {key[1]} do not "
                f"pair up ({len(outers)} outer vs {len(inners)} inner arcs)")
        outers.sort(key=lambda a: tuple(a[0]))
        inners.sort(key=lambda a: tuple(a[0]))
        for o, i in zip(outers, inners):
            merged.append(LayoutCell(ribbon=key[0], facade=key[1],
                                     outer=o, inner=i, nodes=nodes))
    return merged


def _dedupe_ring(ring):
    keep = [0]
    for i in range(1, ring.shape[0]):
        if not np.array_equal(ring[i], ring[keep[-1]]):
            keep.append(i)
    if len(keep) > 1 and np.array_equal(ring[keep[-1]], ring[keep[0]]):
        keep.pop()
    return ring[keep]


def _pair_chains(outer, inner, node, ribbon):
    if len(outer) != len(inner):
        raise LayoutError(
            f"facade splits between levels in {node} "
            f"({len(outer)} vs {len(inner)} runs at ribbon {ribbon})")
    cells = []
    for co, ci in zip(outer, inner):
        if co.cyclic or ci.cyclic:
            raise LayoutError("a band around a single-facade ring is an "
                              "annulus, not a cell; add facade breaks")
        cells.append(LayoutCell(ribbon=ribbon, facade=co.facade,
                                outer=co.pts, inner=ci.pts, nodes=(node,)))
    return cells


def _ring_area(ring):
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _mid_angle(chain, center):
    mid = chain.pts[chain.pts.shape[0] // 2]
    return np.angle(complex(mid[0], mid[1]) - center) % (2.0 * np.pi)


def assemble_layout(footprint, nodes, maps, cutlines, n_ribbons=4,
                    n_rays=720, stitch_tol=None):
    """Build the full lens layout for a partitioned footprint.

    Parameters
    ----------
    footprint : FootprintPolygon
    nodes : list of PartitionNode
    maps : dict node id -> DiskMap
    cutlines : list of Cutline
    n_ribbons : int
        Number of nested bands between the boundary and the core.
    n_rays : int
        Radial resolution per subregion.
    stitch_tol : float, optional
        Matching-point agreement tolerance; defaults to 1e-9 * diameter.

    Returns
    -------
    RibbonLayout
    """
    depth, levels = depth_schedule(footprint, nodes, maps, cutlines,
                                   n_ribbons)
    if stitch_tol is None:
        stitch_tol = 1e-9 * footprint.diameter()

    solves = []
    for node in nodes:
        solves.append(level_set(node.polygon, maps[node.id], footprint,
                                levels, n_rays=n_rays))
    contours = stitch(solves, levels, tol=stitch_tol)

    cells = []
    for sv, node in zip(solves, nodes):
        for r in range(n_ribbons):
            outer = sv.boundary_chains if r == 0 else sv.chains[r - 1]
            inner = sv.chains[r]
            by_f_outer, by_f_inner = {}, {}
            for ch in outer:
                by_f_outer.setdefault(ch.facade, []).append(ch)
            for ch in inner:
                by_f_inner.setdefault(ch.facade, []).append(ch)
            if set(by_f_outer) != set(by_f_inner):
                raise LayoutError(
                    f"facade coverage changed between levels in {node.id}: "
                    f"{sorted(by_f_outer)} vs {sorted(by_f_inner)}")
            cen = maps[node.id].center
            for f in sorted(by_f_outer):
                key = lambda ch: _mid_angle(ch, cen)
                cells.extend(_pair_chains(sorted(by_f_outer[f], key=key),
                                          sorted(by_f_inner[f], key=key),
                                          node.id, r))
    cells = _merge_cells(cells)

    core = [c.points for c in contours
            if abs(c.level - levels[-1]) < 1e-12 * max(depth, 1.0)]
    sectors = []
    for sv in solves:
        sectors.extend(getattr(sv, "sector_curves", []))
    warnings = []
    holes = sum(sv.hole_count for sv in solves)
    if holes:
        warnings.append(f"{holes} boundary rays failed to bracket a level")

    return RibbonLayout(footprint=footprint, nodes=list(nodes),
                        levels=levels, depth=depth, contours=contours,
                        cells=cells, sectors=sectors, core=core,
                        warnings=warnings, n_ribbons=n_ribbons)


def sector_curves(layout):
    """Distinct radial wall curves of a layout, in (node, angle) order.

    One curve separates each pair of adjacent facades within a subregion;
    duplicates from repeated solves are removed.
    """
    seen = {}
    for s in layout.sectors:
        key = (s.node_id, round(s.theta, 12))
        if key not in seen:
            seen[key] = s
    return [seen[k] for k in sorted(seen)]


def layout_to_dict(layout):
    """Layout geometry as a JSON-ready dict with stable ordering."""
    def ring(arr):
        return [[float(x), float(y)] for x, y in np.asarray(arr)]

    nodes = []
    for node in layout.nodes:
        nodes.append({
            "id": node.id,
            "polygon": ring(node.polygon.vertices),
            "facades": [str(f) if _is_cut(f) else int(f)
                        for f in node.polygon.facade_ids],
        })
    ribbons = [{"level": float(c.level), "points": ring(c.points)}
               for c in sorted(layout.contours,
                               key=lambda c: (c.level,
                                              tuple(c.points[0])))]
    sectors = [{"node": s.node_id, "facade_left": int(s.facade_left),
                "facade_right": int(s.facade_right),
                "points": ring(s.points)}
               for s in sorted(layout.sectors,
                               key=lambda s: (s.node_id, s.theta))]
    cells = [{"ribbon": int(c.ribbon), "facade": int(c.facade),
              "polygon": ring(c.polygon)}
             for c in sorted(layout.cells,
                             key=lambda c: (c.ribbon, c.facade))]
    return {
        "footprint": ring(layout.footprint.vertices),
        "nodes": nodes,
        "ribbons": ribbons,
        "sectors": sectors,
        "cells": cells,
    }
