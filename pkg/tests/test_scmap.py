import numpy as np
import pytest

from footlens.errors import CrowdingError, InputError
from footlens.scmap import (
    boundary_inverse,
    conformal_center,
    diskmap_from_json,
    diskmap_to_json,
    interior_alphas,
    map_derivative,
    map_forward,
    map_inverse,
    merge_collinear,
    solve_parameters,
)

from conftest import L, RECT, decompose, make_polygon
from oracles import RECT_2TO1_T0, boundary_distance_bruteforce, sc_side_lengths

SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
TRIANGLE = [[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]]


def circular_gaps(dm):
    th = dm.prevertex_angles
    return (np.roll(th, -1) - th) % (2.0 * np.pi)


@pytest.fixture(scope="module")
def square_map():
    return solve_parameters(make_polygon("square", SQUARE))


@pytest.fixture(scope="module")
def l_map(l_poly):
    return solve_parameters(l_poly)


def disk_samples(n, rmax=0.97, seed=3):
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, 4 * n) + 1j * rng.uniform(-1.0, 1.0, 4 * n)
    z = z[np.abs(z) <= rmax]
    assert z.shape[0] >= n
    return z[:n]


def test_square_prevertices_fourfold(square_map):
    # Centered at the symmetry point, the four prevertices must be a
    # rotated copy of the fourth roots of unity.
    assert np.abs(circular_gaps(square_map) - np.pi / 2).max() < 1e-9


def test_triangle_prevertices_threefold():
    dm = solve_parameters(make_polygon("tri", TRIANGLE))
    assert np.abs(circular_gaps(dm) - 2.0 * np.pi / 3).max() < 1e-9


def test_rectangle_prevertex_angles_match_reference():
    dm = solve_parameters(make_polygon("rect", RECT))
    # RECT_2TO1_T0 is the short-side half arc of the centered 2:1 rectangle
    # computed independently to 40 digits; long and short sides alternate
    # around the ring.
    expected = np.array([np.pi - 2.0 * RECT_2TO1_T0, 2.0 * RECT_2TO1_T0] * 2)
    assert np.abs(circular_gaps(dm) - expected).max() < 1e-6


def test_rectangle_side_ratio():
    dm = solve_parameters(make_polygon("rect", RECT))
    mags = sc_side_lengths(dm.prevertex_angles, dm.betas)
    assert abs(mags[0] / mags[1] - 2.0) < 1e-6
    assert abs(mags[2] / mags[3] - 2.0) < 1e-6


def test_boundary_circle_maps_onto_polygon(square_map):
    th = np.linspace(0.0, 2.0 * np.pi, 401)[:-1] + 1e-4
    w = map_forward(square_map, np.exp(1j * th))
    d = boundary_distance_bruteforce(np.c_[w.real, w.imag],
                                     np.array(SQUARE, dtype=float))
    assert d.max() < 1e-9


def test_vertices_reproduced_at_prevertices(l_map):
    w = map_forward(l_map, l_map.prevertices)
    assert np.abs(w - l_map.vertices).max() < 1e-6 * l_map.diameter()


def test_conformality_and_jacobian(l_map):
    z = disk_samples(1000)
    h = 1e-6
    fx = (map_forward(l_map, z + h) - map_forward(l_map, z)) / h
    fy = (map_forward(l_map, z + 1j * h) - map_forward(l_map, z)) / (1j * h)
    # A conformal map has equal derivatives in both directions, so the
    # finite-difference frames may disagree by at most the 1-degree budget.
    assert np.degrees(np.abs(np.angle(fx / fy))).max() < 1.0
    assert (np.abs(map_derivative(l_map, z)) ** 2 > 0.0).all()


def test_inverse_roundtrip_disk_side(l_map):
    z = disk_samples(1000)
    back = map_inverse(l_map, map_forward(l_map, z))
    assert np.abs(back - z).max() < 1e-6


def test_inverse_roundtrip_polygon_side(l_poly, l_map):
    rng = np.random.default_rng(11)
    pts = rng.uniform(0.0, 1.0, (4000, 2))
    pts = pts[l_poly.contains(pts) & (l_poly.boundary_distance(pts) > 1e-3)]
    w = pts[:1000, 0] + 1j * pts[:1000, 1]
    z = map_inverse(l_map, w)
    assert (np.abs(z) <= 1.0).all()
    assert np.abs(map_forward(l_map, z) - w).max() < 1e-8


def test_center_normalization(square_map):
    assert abs(map_forward(square_map, np.array([0j]))[0]
               - (0.5 + 0.5j)) < 1e-9
    custom = solve_parameters(make_polygon("square", SQUARE),
                              center=0.25 + 0.3j)
    assert abs(map_forward(custom, np.array([0j]))[0] - (0.25 + 0.3j)) < 1e-9


def test_conformal_center_fallback_stays_interior(l_poly):
    # The L centroid is interior but the deepest-point fallback must also
    # hold for thin shapes whose centroid hugs the boundary.
    c = conformal_center(l_poly)
    p = np.array([[c.real, c.imag]])
    assert l_poly.contains(p)[0]
    sliver = make_polygon("sliver", [[0.0, 0.0], [4.0, 0.0], [4.0, 0.08],
                                     [0.2, 0.08], [0.2, 1.0], [0.0, 1.0]])
    c = conformal_center(sliver)
    p = np.array([[c.real, c.imag]])
    assert sliver.contains(p)[0]
    assert sliver.boundary_distance(p)[0] > 0.01


def test_similarity_invariance(square_map):
    s = 0.7 * np.exp(1j * np.pi / 7)
    t = 3.0 - 2.0j
    w = np.array(SQUARE, dtype=float) @ np.array([[1.0], [1j]])
    moved = (s * w.ravel() + t)
    dm = solve_parameters(make_polygon("moved",
                                       np.c_[moved.real, moved.imag]))
    assert np.abs(dm.prevertex_angles
                  - square_map.prevertex_angles).max() < 1e-9
    z = disk_samples(64, seed=5)
    assert np.abs(map_forward(dm, z)
                  - (s * map_forward(square_map, z) + t)).max() < 1e-9


def test_quadrature_order_stability(l_poly, l_map):
    fine = solve_parameters(l_poly, quadrature_order=12)
    assert np.abs(fine.prevertex_angles
                  - l_map.prevertex_angles).max() < 1e-6


def test_flat_stations_reinstated(l_poly):
    graph = decompose(l_poly, resolution=256)[4]
    flat_nodes = [n for n in graph.nodes
                  if np.any(np.abs(interior_alphas(n.polygon.vertices) - 1.0)
                            < 1e-9)]
    # The cut endpoint lands on a straight run of exactly one piece.
    assert len(flat_nodes) == 1
    dm = solve_parameters(flat_nodes[0].polygon)
    assert dm.vertices.shape[0] == flat_nodes[0].polygon.n_vertices
    assert np.any(dm.alphas == 1.0)
    assert (np.diff(dm.prevertex_angles) > 0.0).all()
    w = map_forward(dm, dm.prevertices)
    assert np.abs(w - dm.vertices).max() < 1e-6 * dm.diameter()


def test_merge_collinear_drops_stations():
    poly = make_polygon("station", [[0.0, 0.0], [0.5, 0.0], [1.0, 0.0],
                                    [1.0, 1.0], [0.0, 1.0]])
    merged, keep = merge_collinear(poly)
    assert merged.shape == (4, 2)
    assert keep == [0, 2, 3, 4]


def test_serialization_roundtrip(l_map):
    back = diskmap_from_json(diskmap_to_json(l_map))
    assert np.array_equal(back.prevertex_angles, l_map.prevertex_angles)
    assert np.array_equal(back.vertices, l_map.vertices)
    assert back.A == l_map.A and back.C == l_map.C
    assert back.quad_order == l_map.quad_order
    z = disk_samples(64, seed=7)
    assert np.abs(map_forward(back, z) - map_forward(l_map, z)).max() < 1e-12


def test_unsupported_schema_rejected(l_map):
    import json
    doc = json.loads(diskmap_to_json(l_map))
    doc["schema"] = 999
    with pytest.raises(InputError, match="schema"):
        diskmap_from_json(json.dumps(doc))


def test_too_many_corners_rejected():
    th = 2.0 * np.pi * np.arange(40) / 40
    poly = make_polygon("ring", np.c_[np.cos(th), np.sin(th)])
    with pytest.raises(InputError, match="corner limit"):
        solve_parameters(poly, max_vertices=32)


def test_crowding_guard():
    with pytest.raises(CrowdingError, match="rad apart"):
        solve_parameters(make_polygon("square", SQUARE), crowding_gap=2.0)


def test_map_forward_rejects_outside_disk(square_map):
    with pytest.raises(InputError, match="closed disk"):
        map_forward(square_map, np.array([1.5 + 0.0j]))


def test_boundary_inverse_locates_side_points(square_map):
    w = np.array([0.5 + 0.0j, 1.0 + 0.5j, 0.5 + 1.0j, 0.0 + 0.5j])
    z = boundary_inverse(square_map, w)
    assert np.abs(np.abs(z) - 1.0).max() < 1e-12
    assert np.abs(map_forward(square_map, z) - w).max() < 1e-9
    with pytest.raises(InputError, match="not on the boundary"):
        boundary_inverse(square_map, np.array([0.5 + 0.5j]))
