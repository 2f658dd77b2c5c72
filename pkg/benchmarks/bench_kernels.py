"""Benchmark the compiled kernels against their pure-NumPy fallbacks.

Each kernel is verified for agreement first (1e-12 for the floating-point
kernels, exact cell sets for thinning), then timed with best-of-N repeats.
Run from the repository root:

    python3 benchmarks/bench_kernels.py --repeats 5
"""

import argparse
import sys
import time

import numpy as np
import scipy.ndimage as ndimage

from footlens._kernels import _fallback
from footlens.geometry import FootprintPolygon, rasterize
from footlens.scmap import solve_parameters
import footlens.skeleton as skeleton

try:
    from footlens._kernels import _core
except ImportError:
    print("compiled extension footlens._kernels._core is not built",
          file=sys.stderr)
    sys.exit(1)

L_VERTS = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.5],
           [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]]


def _best(fn, args, repeats):
    spans = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        spans.append(time.perf_counter() - t0)
    return out, min(spans)


def bench_sc_integrals(n_segments, repeats):
    square = FootprintPolygon(
        vertices=np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float),
        name="square")
    dm = solve_parameters(square)
    jn, jw, lx, lw = dm._rules
    z = dm.prevertices
    rng = np.random.default_rng(3)
    za = np.sqrt(rng.uniform(0, 0.9, n_segments)) * \
        np.exp(1j * rng.uniform(0, 2 * np.pi, n_segments))
    zb = np.sqrt(rng.uniform(0, 0.9, n_segments)) * \
        np.exp(1j * rng.uniform(0, 2 * np.pi, n_segments))
    sing = np.where(np.arange(n_segments) % 4 == 0,
                    np.arange(n_segments) % z.shape[0], -1).astype(np.int64)
    za[sing >= 0] = z[sing[sing >= 0]]
    args = (za, zb, sing, z, dm.betas, jn, jw, lx, lw)

    fast, t_fast = _best(_core.sc_segment_integrals, args, repeats)
    slow, t_slow = _best(_fallback.sc_segment_integrals, args, repeats)
    rel = np.abs(fast - slow) / np.maximum(np.abs(slow), 1e-30)
    assert rel.max() < 1e-12, f"integral mismatch {rel.max():.3e}"
    return f"{n_segments} segments", t_fast, t_slow


def bench_min_edge_distance(n_points, repeats):
    rng = np.random.default_rng(5)
    px, py = rng.uniform(-1.0, 2.0, (2, n_points))
    edges = np.array(L_VERTS)
    a = np.repeat(edges, 16, axis=0)
    b = np.repeat(np.roll(edges, -1, axis=0), 16, axis=0)
    args = (px, py, a[:, 0], a[:, 1], b[:, 0], b[:, 1])

    fast, t_fast = _best(_core.min_edge_distance, args, repeats)
    slow, t_slow = _best(_fallback.min_edge_distance, args, repeats)
    assert np.abs(fast - slow).max() < 1e-12
    return f"{n_points} points x {a.shape[0]} edges", t_fast, t_slow


def bench_thin_skeleton(resolution, repeats):
    poly = FootprintPolygon(vertices=np.array(L_VERTS, dtype=float),
                            name="L")
    grid = rasterize(poly, resolution=resolution)
    occ = grid.bits
    dist = ndimage.distance_transform_edt(occ)
    anchors = skeleton._resolve_anchor_ties(
        occ, skeleton._maximal_ball_anchors(occ, dist))
    args = (occ.astype(np.uint8), dist, anchors.astype(np.uint8),
            skeleton.simple_point_lut())

    fast, t_fast = _best(_core.thin_skeleton, args, repeats)
    slow, t_slow = _best(_fallback.thin_skeleton, args, repeats)
    assert np.array_equal(np.asarray(fast), np.asarray(slow)), \
        "thinning outputs differ"
    return f"{resolution}x{resolution} raster", t_fast, t_slow


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="Compare compiled and fallback kernel timings.")
    ap.add_argument("--repeats", type=int, default=5,
                    help="best-of-N timing repeats (default: 5)")
    ap.add_argument("--segments", type=int, default=4000,
                    help="SC integral batch size (default: 4000)")
    ap.add_argument("--points", type=int, default=200000,
                    help="distance query batch size (default: 200000)")
    ap.add_argument("--resolution", type=int, default=256,
                    help="thinning raster resolution (default: 256)")
    args = ap.parse_args(argv)

    rows = [
        ("sc_segment_integrals",) + bench_sc_integrals(args.segments,
                                                       args.repeats),
        ("min_edge_distance",) + bench_min_edge_distance(args.points,
                                                         args.repeats),
        ("thin_skeleton",) + bench_thin_skeleton(args.resolution,
                                                 args.repeats),
    ]
    name_w = max(len(r[0]) for r in rows)
    size_w = max(len(r[1]) for r in rows)
    print(f"{'kernel':<{name_w}}  {'workload':<{size_w}}  "
          f"{'compiled':>10}  {'fallback':>10}  {'speedup':>7}")
    for name, size, fast, slow in rows:
        print(f"{name:<{name_w}}  {size:<{size_w}}  "
              f"{fast * 1e3:>8.2f}ms  {slow * 1e3:>8.2f}ms  "
              f"{slow / fast:>6.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
