"""Disk-to-polygon Schwarz-Christoffel maps.

phi(zeta) = A + C * integral_0^zeta prod_k (1 - t/z_k)^(alpha_k - 1) dt

maps the closed unit disk onto a simple polygon, sending prevertices z_k on
the unit circle to the polygon vertices w_k. The parameter problem (finding
the prevertex angles) is solved in log-gap variables with side-length ratio
equations; a disk automorphism then moves phi(0) onto the polygon's
conformal center and pins the last prevertex at angle 2*pi.

Integrals use compound Gauss-Jacobi quadrature: a panel absorbs the
singularity at its starting prevertex into the rule weight, and panel
lengths obey the one-half rule so no panel endpoint comes within half its
length of another singularity.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize
from scipy.special import roots_jacobi

from ._kernels import sc_segment_integrals
from .errors import ConvergenceError, CrowdingError, InputError, NonConvergenceError
from .geometry import FootprintPolygon, centroid, points_in_polygon, rasterize

_SCHEMA = 1


@dataclass
class DiskMap:
    """A solved Schwarz-Christoffel disk map for one subregion.

    vertices : (n,) complex array
        Target polygon corners; flat stations (facade breaks on straight
        runs) may appear with alpha exactly 1.
    prevertex_angles : (n,) float array
        Strictly increasing in (0, 2*pi], the last pinned at 2*pi.
    alphas : (n,) float array
        Interior angle / pi per corner; sum(1 - alpha) == 2.
    A, C : complex
        Affine normalization: phi(0) = A, scale/rotation C.
    quad_order : int
        Gauss-Jacobi points per quadrature panel.
    center : complex
        The conformal center phi(0) in world coordinates (equals A).
    polygon : FootprintPolygon or None
        The unmerged source polygon, kept for boundary bookkeeping.
    """

    vertices: np.ndarray
    prevertex_angles: np.ndarray
    alphas: np.ndarray
    A: complex
    C: complex
    quad_order: int
    center: complex = None
    polygon: FootprintPolygon = None
    _rules: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex)
        self.prevertex_angles = np.asarray(self.prevertex_angles, dtype=float)
        self.alphas = np.asarray(self.alphas, dtype=float)
        if self.center is None:
            self.center = self.A
        if self._rules is None:
            self._rules = _build_rules(self.alphas - 1.0, self.quad_order)

    @property
    def prevertices(self):
        return np.exp(1j * self.prevertex_angles)

    @property
    def betas(self):
        return self.alphas - 1.0

    def diameter(self):
        w = self.vertices
        return float(np.abs(w[:, None] - w[None, :]).max())


def _build_rules(betas, order):
    jac_nodes = np.empty((betas.shape[0], order))
    jac_weights = np.empty((betas.shape[0], order))
    for k, b in enumerate(betas):
        x, w = roots_jacobi(order, 0.0, b)
        jac_nodes[k] = x
        jac_weights[k] = w
    lx, lw = leggauss(order)
    return jac_nodes, jac_weights, lx, lw


def _integrals(dm_or_parts, za, zb, sing):
    if isinstance(dm_or_parts, DiskMap):
        z = dm_or_parts.prevertices
        betas = dm_or_parts.betas
        rules = dm_or_parts._rules
    else:
        z, betas, rules = dm_or_parts
    jn, jw, lx, lw = rules
    return sc_segment_integrals(
        np.atleast_1d(np.asarray(za, dtype=complex)),
        np.atleast_1d(np.asarray(zb, dtype=complex)),
        np.atleast_1d(np.asarray(sing, dtype=np.int64)),
        z, betas, jn, jw, lx, lw)


def _side_integrals(parts, zc):
    # Integral of f along each polygon side's chord z_k -> z_{k+1}, split at
    # the chord midpoint so each half absorbs its own endpoint singularity.
    n = zc.shape[0]
    z_from = zc
    z_to = np.roll(zc, -1)
    mid = 0.5 * (z_from + z_to)
    za = np.concatenate([z_from, z_to])
    zb = np.concatenate([mid, mid])
    sing = np.concatenate([np.arange(n), (np.arange(n) + 1) % n])
    halves = _integrals(parts, za, zb, sing)
    return halves[:n] - halves[n:]


def merge_collinear(polygon, angle_tol=1e-9):
    """Vertices of the polygon with angle-pi corners removed.

    Returns (vertices, kept_indices); cut endpoints inserted mid-edge by the
    partitioner disappear here while the polygon object keeps them.
    """
    v = polygon.vertices
    n = v.shape[0]
    keep = []
    for k in range(n):
        a = v[k] - v[(k - 1) % n]
        b = v[(k + 1) % n] - v[k]
        turn = np.arctan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
        if abs(turn) > angle_tol:
            keep.append(k)
    if len(keep) < 3:
        raise InputError("polygon merges to fewer than 3 corners")
    return v[keep], keep


def interior_alphas(vertices):
    """Interior angle / pi at each corner of a CCW ring given as (n, 2)."""
    v = vertices
    n = v.shape[0]
    a = v - np.roll(v, 1, axis=0)
    b = np.roll(v, -1, axis=0) - v
    turn = np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
                      (a * b).sum(axis=1))
    return 1.0 - turn / np.pi


def conformal_center(polygon):
    """Interior normalization point: area centroid, or the deepest interior
    point when the centroid sits too close to (or outside) the boundary."""
    c = centroid(polygon)
    diam = polygon.diameter()
    inside = bool(points_in_polygon(c[None, :], polygon.vertices)[0])
    if inside and float(polygon.boundary_distance(c[None, :])[0]) >= 0.02 * diam:
        return complex(c[0], c[1])
    grid = rasterize(polygon, resolution=128)
    from .geometry import distance_field
    df = distance_field(polygon, grid)
    iy, ix = np.unravel_index(np.argmax(df.values), df.values.shape)
    x0, y0 = grid.cell_to_world(iy, ix)

    def depth(p):
        if not points_in_polygon(np.asarray(p)[None, :], polygon.vertices)[0]:
            return diam
        return -float(polygon.boundary_distance(np.asarray(p)[None, :])[0])

    res = optimize.minimize(depth, np.array([float(x0), float(y0)]),
                            method="Nelder-Mead",
                            options={"xatol": 1e-12 * diam,
                                     "fatol": 1e-12 * diam, "maxiter": 400})
    return complex(res.x[0], res.x[1])


def _gaps_to_angles(y, n):
    # n-3 free angles in (0, pi) from unconstrained gap variables; the
    # parameterization keeps the ordering by construction.
    g = np.exp(np.concatenate([-y, [0.0]]))
    cums = np.cumsum(g)
    return np.pi * cums[:-1] / cums[-1]


def _angles_to_gaps(theta):
    bounds = np.concatenate([[0.0], theta, [np.pi]])
    g = np.diff(bounds)
    g = np.maximum(g, 1e-14)
    return -np.log(g[:-1] / g[-1])


def _mobius_three_point(z_src, z_dst):
    # The Mobius map sending three circle points to three circle points,
    # via cross-ratio matching; orientation-consistent triples give a disk
    # automorphism.
    z1, z2, z3 = z_src
    w1, w2, w3 = z_dst

    def coeffs(a, b, c):
        # (z; a,b,c) = (z-a)(b-c) / ((z-c)(b-a)) as a 2x2 matrix.
        return np.array([[b - c, -a * (b - c)], [b - a, -c * (b - a)]])

    m_src = coeffs(z1, z2, z3)
    m_dst = coeffs(w1, w2, w3)
    m = np.linalg.inv(m_dst) @ m_src
    return lambda z: (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def solve_parameters(polygon, quadrature_order=8, max_vertices=32,
                     residual_tol=1e-8, crowding_gap=1e-12, center=None):
    """Solve the parameter problem for a subregion polygon.

    Parameters
    ----------
    polygon : FootprintPolygon
        Simple CCW polygon. Collinear vertices are merged for the solve and
        reinstated afterwards as angle-pi stations.
    quadrature_order : int
        Gauss-Jacobi points per panel (default 8).
    max_vertices : int
        Reject polygons with more corners after merging.
    residual_tol : float
        Maximum allowed side-length-ratio residual.
    crowding_gap : float
        Minimum prevertex angle gap (radians) before a crowding error.
    center : complex, optional
        Override for the conformal center phi(0).

    Returns
    -------
    DiskMap

    Raises
    ------
    ConvergenceError
        If the nonlinear solve stalls above ``residual_tol``.
    CrowdingError
        If two prevertices collapse within ``crowding_gap``.
    """
    n_full = polygon.vertices.shape[0]
    merged, keep = merge_collinear(polygon)
    if len(keep) < n_full and keep[-1] != n_full - 1:
        # Rotate the ring to end on a true corner: every flat station then
        # falls strictly inside a solved prevertex arc, never on the seam.
        shift = (keep[-1] + 1) % n_full
        ids = list(polygon.facade_ids)
        polygon = FootprintPolygon(
            vertices=np.roll(polygon.vertices, -shift, axis=0),
            facade_ids=ids[shift:] + ids[:shift],
            units=polygon.units, name=polygon.name)
        merged, keep = merge_collinear(polygon)
    n = merged.shape[0]
    if n > max_vertices:
        raise InputError(f"{n} corners exceed the {max_vertices}-corner limit;"
                         " partition the footprint further")
    w = merged[:, 0] + 1j * merged[:, 1]
    alphas = interior_alphas(merged)
    if not np.all((alphas > 0.0) & (alphas < 2.0)):
        raise InputError("interior angles must lie strictly between 0 and 2*pi")
    betas = alphas - 1.0
    rules = _build_rules(betas, quadrature_order)
    side_len = np.abs(np.roll(w, -1) - w)

    fixed = np.array([np.pi, 1.5 * np.pi, 2.0 * np.pi])

    if n == 3:
        theta = fixed.copy()
    else:
        # Initial guess: equispaced prevertices pushed through the Mobius map
        # that pins the last three at the fixed triple.
        equi = 2.0 * np.pi * np.arange(1, n + 1) / n
        mob = _mobius_three_point(np.exp(1j * equi[-3:]), np.exp(1j * fixed))
        guess = np.angle(mob(np.exp(1j * equi[:n - 3]))) % (2.0 * np.pi)
        guess = np.sort(np.clip(guess, 1e-6, np.pi - 1e-6))
        y0 = _angles_to_gaps(guess)

        target = side_len[1:n - 2] / side_len[0]

        def residual(y):
            th = _gaps_to_angles(y, n)
            zc = np.exp(1j * np.concatenate([th, fixed]))
            ints = _side_integrals((zc, betas, rules), zc)
            mags = np.abs(ints)
            return mags[1:n - 2] / mags[0] - target

        sol = optimize.root(residual, y0, method="hybr",
                            options={"xtol": 1e-13, "maxfev": 200 * (n + 1)})
        res_norm = float(np.max(np.abs(sol.fun)))
        if res_norm > residual_tol:
            raise ConvergenceError(
                f"parameter problem stalled at residual {res_norm:.3e}",
                residual=res_norm)
        theta = np.concatenate([_gaps_to_angles(sol.x, n), fixed])

    gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * np.pi]]))
    k = int(np.argmin(gaps))
    if gaps[k] < crowding_gap:
        raise CrowdingError(
            f"prevertices of corners {k} and {(k + 1) % n} are "
            f"{gaps[k]:.3e} rad apart", pair=(k, (k + 1) % n))

    zc = np.exp(1j * theta)
    parts = (zc, betas, rules)

    # Affine constants of the un-recentered map, from side 0 and vertex 0.
    i0 = _side_integrals(parts, zc)[0]
    c_t = (w[1] - w[0]) / i0
    j0 = _integrals(parts, zc[:1], np.zeros(1, complex), np.array([0]))[0]
    a_t = w[0] - c_t * (-j0)

    cen = center if center is not None else conformal_center(polygon)
    a_hat = _invert_center(parts, a_t, c_t, cen, w)

    rho = np.angle((zc[-1] - a_hat) / (1.0 - np.conj(a_hat) * zc[-1]))
    znew = np.exp(-1j * rho) * (zc - a_hat) / (1.0 - np.conj(a_hat) * zc)
    znew /= np.abs(znew)
    theta_new = np.angle(znew) % (2.0 * np.pi)
    theta_new[-1] = 2.0 * np.pi
    if np.any(np.diff(theta_new) <= 0.0):
        raise ConvergenceError("recentering scrambled the prevertex order")

    a_new = w[0] + c_t * _integrals(parts, zc[:1], np.full(1, a_hat),
                                    np.array([0]))[0]
    rules_new = rules
    parts_new = (np.exp(1j * theta_new), betas, rules_new)
    k_last = _integrals(parts_new, np.exp(1j * theta_new[-1:]),
                        np.zeros(1, complex),
                        np.array([n - 1]))[0]
    c_new = (w[-1] - a_new) / (-k_last)

    dm = DiskMap(vertices=w, prevertex_angles=theta_new, alphas=alphas,
                 A=complex(a_new), C=complex(c_new),
                 quad_order=quadrature_order, center=complex(cen),
                 polygon=polygon, _rules=rules_new)

    if len(keep) < n_full:
        dm = _reinstate_flat_stations(dm, polygon, keep)

    # Vertex reproduction through the quadrature itself; map_forward snaps
    # prevertex queries to the stored corners, which would hide a bad solve.
    # Evaluated at a higher order than production so the gate measures the
    # prevertex solution, not quadrature truncation.
    m = dm.vertices.shape[0]
    check = _build_rules(dm.betas, dm.quad_order + 8)
    ints = _integrals((dm.prevertices, dm.betas, check), dm.prevertices,
                      np.zeros(m, dtype=complex), np.arange(m))
    err = float(np.abs((dm.A - dm.C * ints) - dm.vertices).max()) \
        / max(dm.diameter(), 1e-300)
    if err > 1e-7 and quadrature_order < 14:
        # Near-flat corners make the side-ratio system insensitive to the
        # prevertices, so quadrature bias leaks into the solve; one retry at
        # a finer rule sharpens it.
        return solve_parameters(polygon, quadrature_order + 6, max_vertices,
                                residual_tol, crowding_gap, center)
    if err > 1e-6:
        raise ConvergenceError(
            f"vertex reproduction off by {err:.3e} of the diameter",
            residual=err)
    return dm


def _reinstate_flat_stations(core, polygon, keep):
    # Flat (angle-pi) stations contribute unit factors to the integrand, so
    # the parameter problem ran on true corners only; each station's
    # prevertex follows from boundary inversion on the solved map, and the
    # rebuilt DiskMap evaluates identically while exposing the full ring.
    v = polygon.vertices
    n = v.shape[0]
    w_full = v[:, 0] + 1j * v[:, 1]
    kept = np.zeros(n, dtype=bool)
    kept[list(keep)] = True
    flats = np.flatnonzero(~kept)
    th = np.angle(boundary_inverse(core, w_full[flats])) % (2.0 * np.pi)
    theta_full = np.empty(n)
    theta_full[kept] = core.prevertex_angles
    theta_full[flats] = th
    alphas_full = np.ones(n)
    alphas_full[kept] = core.alphas
    if theta_full[0] <= 0.0 or np.any(np.diff(theta_full) <= 0.0):
        raise ConvergenceError("flat stations broke the prevertex order")
    return DiskMap(vertices=w_full, prevertex_angles=theta_full,
                   alphas=alphas_full, A=core.A, C=core.C,
                   quad_order=core.quad_order, center=core.center,
                   polygon=polygon)


def _invert_center(parts, a_t, c_t, cen, w):
    # Newton for phi~(a) = cen from a = 0; phi~' = C~ * f.
    zc, betas, rules = parts
    a = 0.0 + 0.0j
    target = complex(cen)
    diam = float(np.abs(w[:, None] - w[None, :]).max())
    for _ in range(80):
        phi_a = w[0] + c_t * _integrals(parts, zc[:1], np.full(1, a),
                                        np.array([0]))[0]
        resid = phi_a - target
        if abs(resid) <= 1e-13 * diam:
            return a
        fa = np.exp((betas * np.log(1.0 - a / zc)).sum())
        step = resid / (c_t * fa)
        nxt = a - step
        halv = 0
        while abs(nxt) >= 1.0 and halv < 60:
            step *= 0.5
            nxt = a - step
            halv += 1
        a = nxt
    raise ConvergenceError("center inversion did not converge")


def map_derivative(dm, z):
    """phi'(z) = C * prod_k (1 - z/z_k)^beta_k, vectorized over z."""
    z = np.asarray(z, dtype=complex)
    zc = dm.prevertices
    logs = np.log(1.0 - z[..., None] / zc)
    return dm.C * np.exp(logs @ dm.betas)


def map_forward(dm, z):
    """Evaluate the map at points of the closed unit disk.

    Parameters
    ----------
    dm : DiskMap
    z : complex array-like
        Points with |z| <= 1 (a 1e-9 overshoot is projected back).

    Returns
    -------
    complex ndarray of the same shape

    Notes
    -----
    Each point integrates from its nearest anchor (the center or a
    prevertex), so no quadrature panel straddles a singularity; evaluation
    exactly at a prevertex returns the polygon vertex.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    pts = z.ravel().copy()
    r = np.abs(pts)
    if np.any(r > 1.0 + 1e-9):
        raise InputError("map_forward: points must lie in the closed disk")
    over = r > 1.0
    pts[over] /= r[over]

    zc = dm.prevertices
    n = zc.shape[0]
    dprev = np.abs(pts[:, None] - zc[None, :])
    nearest = np.argmin(dprev, axis=1)
    dbest = dprev[np.arange(pts.shape[0]), nearest]

    out = np.empty(pts.shape[0], dtype=complex)
    at_vertex = dbest <= 1e-13
    out[at_vertex] = dm.vertices[nearest[at_vertex]]

    todo = ~at_vertex
    if todo.any():
        sub = pts[todo]
        use_center = np.abs(sub) < dbest[todo]
        za = np.where(use_center, 0.0 + 0.0j, zc[nearest[todo]])
        sing = np.where(use_center, -1, nearest[todo])
        base = np.where(use_center, dm.A, dm.vertices[nearest[todo]])
        ints = _integrals(dm, za, sub, sing)
        out[todo] = base + dm.C * ints
    return out.reshape(shape)


def map_inverse(dm, w, tol=1e-10, max_iter=50):
    """Invert the map at points inside (or on) the target polygon.

    Parameters
    ----------
    dm : DiskMap
    w : complex array-like
    tol : float
        Residual target relative to the polygon diameter.
    max_iter : int
        Newton iterations per attempt.

    Returns
    -------
    complex ndarray of disk points with |z| <= 1

    Raises
    ------
    NonConvergenceError
        When a point fails Newton from the ODE seed, a denser ODE seed, and
        a ring of fallback seeds.
    """
    w = np.asarray(w, dtype=complex)
    shape = w.shape
    target = w.ravel()
    diam = dm.diameter()

    z = _ode_seed(dm, target, steps=24)
    z, bad = _newton(dm, z, target, tol * diam, max_iter)
    if bad.any():
        z2 = _ode_seed(dm, target[bad], steps=96)
        z2, bad2 = _newton(dm, z2, target[bad], tol * diam, max_iter)
        idx = np.flatnonzero(bad)
        z[idx] = z2
        still = idx[bad2]
        for i in still:
            z[i] = _multi_seed(dm, target[i], tol * diam, max_iter)
        bad = np.zeros_like(bad)

    resid = np.abs(map_forward(dm, z) - target)
    worst = int(np.argmax(resid))
    if resid[worst] > 1e-6 * diam:
        raise NonConvergenceError(
            f"inverse failed at {target[worst]:.6g} "
            f"(residual {resid[worst]:.3e})", point=target[worst])
    return z.reshape(shape)


def _ode_seed(dm, target, steps):
    # Integrate dz/dt = (w - A) / phi'(z) from the center along straight
    # codomain segments; fixed-step RK4.
    z = np.zeros(target.shape[0], dtype=complex)
    dw = target - dm.A
    h = 1.0 / steps

    def vel(zz):
        d = map_derivative(dm, zz)
        small = np.abs(d) < 1e-300
        d[small] = 1e-300
        return dw / d

    for _ in range(steps):
        k1 = vel(z)
        k2 = vel(_clip_disk(z + 0.5 * h * k1))
        k3 = vel(_clip_disk(z + 0.5 * h * k2))
        k4 = vel(_clip_disk(z + h * k3))
        z = _clip_disk(z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
    return z


def _clip_disk(z, margin=1e-12):
    r = np.abs(z)
    over = r > 1.0 - margin
    out = z.copy()
    out[over] = z[over] / r[over] * (1.0 - margin)
    return out


def _newton(dm, z, target, abs_tol, max_iter):
    z = z.copy()
    active = np.ones(z.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        resid = map_forward(dm, z[active]) - target[active]
        done = np.abs(resid) <= abs_tol
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if done.all():
            break
        idx = idx[~done]
        step = resid[~done] / map_derivative(dm, z[idx])
        z[idx] = _clip_disk(z[idx] - step, margin=0.0)
        over = np.abs(z[idx]) > 1.0
        z[idx[over]] /= np.abs(z[idx[over]])
    resid = np.abs(map_forward(dm, z) - target)
    return z, resid > abs_tol


def _multi_seed(dm, w1, abs_tol, max_iter):
    seeds = [0.0 + 0.0j]
    for t in np.linspace(0.0, 2.0 * np.pi, 17)[:-1]:
        seeds.append(0.9 * np.exp(1j * t))
    seeds = np.array(seeds, dtype=complex)
    z, bad = _newton(dm, seeds, np.full(seeds.shape[0], w1), abs_tol,
                     max_iter)
    resid = np.abs(map_forward(dm, z) - w1)
    best = int(np.argmin(resid))
    if resid[best] > abs_tol:
        raise NonConvergenceError(
            f"inverse failed at {w1:.6g} (residual {resid[best]:.3e})",
            point=w1)
    return z[best]


def boundary_inverse(dm, w):
    """Pre-images of points lying on the polygon boundary.

    Each point is located on its side and matched by arc length: theta
    solves |phi(e^{i theta}) - w_k| measured along the side. Vertices snap
    to their prevertices.
    """
    w = np.asarray(w, dtype=complex)
    shape = w.shape
    pts = w.ravel()
    out = np.empty(pts.shape[0], dtype=complex)
    verts = dm.vertices
    n = verts.shape[0]
    theta = dm.prevertex_angles
    diam = dm.diameter()

    nxt = np.roll(verts, -1)
    edge = nxt - verts
    elen2 = (edge * np.conj(edge)).real

    for i, p in enumerate(pts):
        dv = np.abs(verts - p)
        k = int(np.argmin(dv))
        if dv[k] <= 1e-12 * diam:
            out[i] = np.exp(1j * theta[k])
            continue
        t = ((p - verts) * np.conj(edge)).real / elen2
        t = np.clip(t, 0.0, 1.0)
        foot = verts + t * edge
        k = int(np.argmin(np.abs(p - foot)))
        if np.abs(p - foot[k]) > 1e-6 * diam:
            raise InputError(f"point {p:.6g} is not on the boundary")
        tk = t[k]
        th0 = theta[k]
        th1 = theta[k] + (theta[(k + 1) % n] - theta[k]) % (2.0 * np.pi)
        if tk <= 1e-12:
            out[i] = np.exp(1j * th0)
            continue
        if tk >= 1.0 - 1e-12:
            out[i] = np.exp(1j * th1)
            continue
        goal = tk * np.sqrt(elen2[k])

        def arc(th):
            val = _integrals(dm, np.array([np.exp(1j * th0)]),
                             np.array([np.exp(1j * th)]),
                             np.array([k]))[0]
            return abs(dm.C) * abs(val) - goal

        lo = th0 + 1e-12 * (th1 - th0)
        hi = th1 - 1e-12 * (th1 - th0)
        th = optimize.brentq(arc, lo, hi, xtol=1e-13, rtol=8.9e-16)
        out[i] = np.exp(1j * th)
    return out.reshape(shape)


def diskmap_to_dict(dm):
    """JSON-ready dict capturing the map (rules are rebuilt on load)."""
    return {
        "schema": _SCHEMA,
        "vertices": [[float(v.real), float(v.imag)] for v in dm.vertices],
        "prevertex_angles": [float(t) for t in dm.prevertex_angles],
        "alphas": [float(a) for a in dm.alphas],
        "A": [float(dm.A.real), float(dm.A.imag)],
        "C": [float(dm.C.real), float(dm.C.imag)],
        "quad_order": int(dm.quad_order),
        "center": [float(dm.center.real), float(dm.center.imag)],
    }


def diskmap_from_dict(doc, polygon=None):
    if doc.get("schema") != _SCHEMA:
        raise InputError(f"unsupported disk-map schema {doc.get('schema')!r}")
    verts = np.array([complex(x, y) for x, y in doc["vertices"]])
    return DiskMap(vertices=verts,
                   prevertex_angles=np.array(doc["prevertex_angles"]),
                   alphas=np.array(doc["alphas"]),
                   A=complex(doc["A"][0], doc["A"][1]),
                   C=complex(doc["C"][0], doc["C"][1]),
                   quad_order=int(doc["quad_order"]),
                   center=complex(doc["center"][0], doc["center"][1]),
                   polygon=polygon)


def diskmap_to_json(dm):
    return json.dumps(diskmap_to_dict(dm), sort_keys=True,
                      separators=(",", ":"))


def diskmap_from_json(text, polygon=None):
    return diskmap_from_dict(json.loads(text), polygon=polygon)
