import numpy as np
import pytest

from footlens.geometry import FootprintPolygon, rasterize, distance_field
from footlens.skeleton import skeletonize, extract_signature
from footlens.partition import compute_cutlines, partition
from footlens.scmap import solve_parameters
from footlens.ribbons import assemble_layout

# Fixture corpus: rectangle (primitive), L (one neck), U (two necks),
# T (three-way junction with the degenerate equal-tangency neck).
RECT = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]
L = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 0.5], [0.5, 1.0], [0.0, 1.0]]
U = [[0.0, 0.0], [3.0, 0.0], [3.0, 2.0], [2.0, 2.0],
     [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]]
T = [[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 1.0],
     [2.0, 2.0], [1.0, 2.0], [1.0, 1.0], [0.0, 1.0]]


def make_polygon(name, verts):
    return FootprintPolygon(vertices=np.array(verts, dtype=float), name=name)


def decompose(polygon, resolution=512):
    grid = rasterize(polygon, resolution=resolution)
    dist = distance_field(polygon, grid)
    skel = skeletonize(grid)
    sig = extract_signature(skel)
    cuts = compute_cutlines(polygon, skel, sig, dist)
    graph = partition(polygon, cuts)
    return grid, dist, skel, cuts, graph


def full_layout(polygon, n_ribbons=4, max_vertices=32, n_rays=720):
    _, _, _, cuts, graph = decompose(polygon)
    maps = {n.id: solve_parameters(n.polygon, max_vertices=max_vertices)
            for n in graph.nodes}
    layout = assemble_layout(polygon, graph.nodes, maps, cuts,
                             n_ribbons=n_ribbons, n_rays=n_rays)
    return graph, maps, layout


@pytest.fixture(scope="session")
def rect_poly():
    return make_polygon("rect", RECT)


@pytest.fixture(scope="session")
def l_poly():
    return make_polygon("L", L)


@pytest.fixture(scope="session")
def u_poly():
    return make_polygon("U", U)


@pytest.fixture(scope="session")
def t_poly():
    return make_polygon("T", T)


@pytest.fixture(scope="session")
def l_decomposition(l_poly):
    return decompose(l_poly)


@pytest.fixture(scope="session")
def l_layout(l_poly):
    return full_layout(l_poly)


@pytest.fixture(scope="session")
def u_layout(u_poly):
    return full_layout(u_poly)


@pytest.fixture(scope="session")
def rect_layout(rect_poly):
    return full_layout(rect_poly)


@pytest.fixture(scope="session")
def t_layout(t_poly):
    return full_layout(t_poly)
