import json
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.ndimage as ndimage

import footlens.skeleton as skeleton
from footlens._kernels import _fallback
from footlens.geometry import rasterize
from footlens.scmap import solve_parameters

from conftest import L, RECT, make_polygon

_core = pytest.importorskip("footlens._kernels._core",
                            reason="compiled kernel extension not built")


@pytest.fixture(scope="module")
def square_map():
    square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    return solve_parameters(make_polygon("square", square))


def test_min_edge_distance_parity():
    rng = np.random.default_rng(7)
    px, py = rng.uniform(-3.0, 3.0, (2, 4000))
    ax, ay = rng.uniform(-3.0, 3.0, (2, 60))
    bx, by = rng.uniform(-3.0, 3.0, (2, 60))
    compiled = _core.min_edge_distance(px, py, ax, ay, bx, by)
    reference = _fallback.min_edge_distance(px, py, ax, ay, bx, by)
    assert np.abs(compiled - reference).max() < 1e-12
    # Degenerate zero-length segments must not divide by zero.
    one = np.array([0.5])
    d = _core.min_edge_distance(one, one, one, one, one, one)
    assert abs(d[0] - _fallback.min_edge_distance(one, one, one, one,
                                                  one, one)[0]) < 1e-15


def test_sc_segment_integrals_parity(square_map):
    jn, jw, lx, lw = square_map._rules
    z = square_map.prevertices
    betas = square_map.betas
    rng = np.random.default_rng(11)
    m = 500
    za = np.sqrt(rng.uniform(0, 0.9, m)) * \
        np.exp(1j * rng.uniform(0, 2 * np.pi, m))
    zb = np.sqrt(rng.uniform(0, 0.9, m)) * \
        np.exp(1j * rng.uniform(0, 2 * np.pi, m))
    sing = np.full(m, -1, dtype=np.int64)
    # A quarter of the segments start exactly at a prevertex singularity.
    k = rng.integers(0, 4, m // 4)
    za[:m // 4] = z[k]
    sing[:m // 4] = k
    compiled = _core.sc_segment_integrals(za, zb, sing, z, betas,
                                          jn, jw, lx, lw)
    reference = _fallback.sc_segment_integrals(za, zb, sing, z, betas,
                                               jn, jw, lx, lw)
    rel = np.abs(compiled - reference) / np.maximum(np.abs(reference), 1e-30)
    assert rel.max() < 1e-12
    # Zero-length segments integrate to exactly zero on both backends.
    zero = _core.sc_segment_integrals(zb[:4], zb[:4], sing[:4] * 0 - 1,
                                      z, betas, jn, jw, lx, lw)
    assert np.abs(zero).max() == 0.0


def test_thin_skeleton_parity_is_exact():
    grid = rasterize(make_polygon("L", L), resolution=192)
    occ = grid.bits
    dist = ndimage.distance_transform_edt(occ)
    anchors = skeleton._resolve_anchor_ties(
        occ, skeleton._maximal_ball_anchors(occ, dist))
    lut = skeleton.simple_point_lut()
    compiled = np.asarray(_core.thin_skeleton(occ.astype(np.uint8), dist,
                                              anchors.astype(np.uint8), lut))
    reference = np.asarray(_fallback.thin_skeleton(
        occ.astype(np.uint8), dist, anchors.astype(np.uint8), lut))
    assert np.array_equal(compiled, reference)
    assert compiled.sum() > 0


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("FOOTLENS_FORCE_FALLBACK", None)
    if env_value is not None:
        env["FOOTLENS_FORCE_FALLBACK"] = env_value
    out = subprocess.run(
        [sys.executable, "-c",
         "from footlens._kernels import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_backend_selection_honors_environment():
    assert _backend_in_subprocess(None) == "compiled"
    assert _backend_in_subprocess("1") == "fallback"
    # Only the literal "1" forces the fallback.
    assert _backend_in_subprocess("0") == "compiled"


def test_benchmark_script_smoke():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out = subprocess.run(
        [sys.executable, os.path.join(root, "benchmarks", "bench_kernels.py"),
         "--repeats", "1", "--segments", "200", "--points", "5000",
         "--resolution", "96"],
        capture_output=True, text=True, cwd=root)
    assert out.returncode == 0, out.stderr
    lines = out.stdout.strip().splitlines()
    assert lines[0].startswith("kernel")
    assert len(lines) == 4 and all("x" in ln for ln in lines[1:])


def _values(node):
    if isinstance(node, dict):
        for v in sorted(node):
            yield from _values(node[v])
    elif isinstance(node, list):
        for v in node:
            yield from _values(v)
    elif isinstance(node, float):
        yield node


def test_backends_agree_end_to_end(tmp_path):
    fp = tmp_path / "fp.geojson"
    fp.write_text(json.dumps({"type": "Polygon",
                              "coordinates": [RECT + [RECT[0]]]}))
    csv = tmp_path / "s.csv"
    csv.write_text("facade_id,time_index,value\n" +
                   "".join(f"{f},{t},{f + t}\n"
                           for f in range(4) for t in range(4)))
    docs = {}
    for label, force in [("compiled", None), ("fallback", "1")]:
        env = dict(os.environ)
        env.pop("FOOTLENS_FORCE_FALLBACK", None)
        if force:
            env["FOOTLENS_FORCE_FALLBACK"] = force
        out = tmp_path / label
        done = subprocess.run(
            ["footlens", "--footprint", str(fp), "--data", str(csv),
             "--out", str(out), "--grid-res", "128", "--rays", "180"],
            capture_output=True, text=True, env=env)
        assert done.returncode == 0, done.stderr
        report = json.loads((out / "report.json").read_text())
        assert report["backend"] == label
        docs[label] = json.loads((out / "viewer.json").read_text())
    a = np.array(list(_values(docs["compiled"])))
    b = np.array(list(_values(docs["fallback"])))
    assert a.shape == b.shape
    assert np.abs(a - b).max() < 1e-9
