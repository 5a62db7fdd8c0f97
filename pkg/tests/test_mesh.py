import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amipdg.mesh import (Mesh, MeshError, bisect, build_edges, build_structured_mesh,
                         check_conforming, element_geometry, min_angle, read_mesh,
                         shape_ratio, uniform_refine, write_mesh)

from conftest import unit_square_two_triangles


def test_structured_square_m2():
    m = build_structured_mesh("square", 2)
    assert m.n_triangles == 8 and m.n_vertices == 9


def test_structured_square_m8():
    assert build_structured_mesh("square", 8).n_triangles == 128


def test_structured_lshape_m8():
    m = build_structured_mesh("lshape", 8)
    assert m.n_triangles == 96
    c = m.geometry.centroid
    assert not np.any((c[:, 0] > 0) & (c[:, 1] > 0))
    assert m.geometry.area.sum() == pytest.approx(3.0)


def test_structured_mesh_rejects_bad_sizes():
    with pytest.raises(MeshError):
        build_structured_mesh("square", 1)
    with pytest.raises(MeshError):
        build_structured_mesh("lshape", 3)
    with pytest.raises(MeshError):
        build_structured_mesh("disc", 4)


def test_two_triangle_square_edges():
    topo = build_edges(unit_square_two_triangles())
    assert topo.n_edges == 5 and len(topo.interior) == 1


def test_m2_edges_and_euler():
    m = build_structured_mesh("square", 2)
    topo = m.edges
    assert topo.n_edges == 16 and len(topo.interior) == 8
    assert m.n_vertices - topo.n_edges + m.n_triangles == 1


def test_boundary_edges_have_one_neighbour():
    topo = build_structured_mesh("lshape", 6).edges
    b = topo.is_boundary
    assert np.all(topo.edge_tri[b, 0] >= 0) and np.all(topo.edge_tri[b, 1] == -1)
    assert np.all(topo.edge_tri[~b] >= 0)


def test_right_triangle_geometry():
    m = Mesh.from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    g = element_geometry(m, 0)
    assert g.area[()] == pytest.approx(0.5)
    assert g.h[()] == pytest.approx(1 / np.sqrt(2))
    # local edge 0 is opposite vertex 0, i.e. the hypotenuse
    np.testing.assert_allclose(g.normal[0], [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)


def test_tangent_is_normal_rotated_ccw():
    g = build_structured_mesh("square", 4).geometry
    n, t = g.normal, g.tangent
    np.testing.assert_allclose(t[..., 0], -n[..., 1])
    np.testing.assert_allclose(t[..., 1], n[..., 0])


def test_closed_boundary_of_every_triangle(rng):
    m = Mesh.from_arrays(rng.uniform(size=(3, 2)), [(0, 1, 2)])
    g = build_structured_mesh("lshape", 4).geometry
    for geom in (m.geometry, g):
        s = np.einsum("tk,tki->ti", geom.edge_length, geom.normal)
        np.testing.assert_allclose(s, 0.0, atol=1e-14)


def test_non_manifold_input_rejected():
    v = [(0, 0), (1, 0), (0, 1), (0, -1), (1, 1)]
    with pytest.raises(MeshError):
        build_edges(Mesh.from_arrays(v, [(0, 1, 2), (0, 1, 3), (0, 1, 4)]))


def test_degenerate_triangle_rejected():
    with pytest.raises(MeshError):
        Mesh.from_arrays([(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])


def test_empty_marking_returns_same_mesh():
    m = build_structured_mesh("square", 4)
    assert bisect(m, []) is m


def test_two_triangle_square_mark_one():
    m = unit_square_two_triangles()
    r = bisect(m, [0])
    assert r.n_triangles == 4
    check_conforming(r)


def test_mark_all_doubles():
    m = build_structured_mesh("lshape", 4)
    r = bisect(m, np.arange(m.n_triangles))
    assert r.n_triangles == 2 * m.n_triangles
    assert np.all(r.generation == 1)


def test_refinement_keeps_area_and_orientation(rng):
    m = build_structured_mesh("square", 4)
    for _ in range(6):
        m = bisect(m, rng.choice(m.n_triangles, 3, replace=False))
        assert np.all(m.geometry.area > 0)
        assert m.geometry.area.sum() == pytest.approx(4.0, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rounds=st.integers(1, 8),
       domain=st.sampled_from(["square", "lshape"]))
def test_random_refinement_is_conforming_and_shape_regular(seed, rounds, domain):
    rng = np.random.default_rng(seed)
    m = build_structured_mesh(domain, 4)
    ratio0 = shape_ratio(m).max()
    angle0 = min_angle(m)
    for _ in range(rounds):
        k = int(rng.integers(1, 4))
        m = bisect(m, rng.choice(m.n_triangles, k, replace=False))
    check_conforming(m)
    # newest-vertex bisection of this mesh only produces similar triangles
    assert shape_ratio(m).max() <= max(10.0, ratio0) + 1e-9
    assert min_angle(m) >= angle0 - 1e-12


def test_uniform_refinement_halves_h():
    m = build_structured_mesh("square", 4)
    r = uniform_refine(m, 2)
    assert r.n_triangles == 4 * m.n_triangles
    assert r.h == pytest.approx(m.h / 2)


def test_hanging_node_detected():
    # split one triangle of the two-triangle square without its neighbour
    v = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
    m = Mesh.from_arrays(v, [(0, 1, 4), (1, 2, 4), (0, 2, 3)])
    with pytest.raises(MeshError):
        check_conforming(m)


def test_mesh_round_trip(tmp_path, rng):
    m = bisect(build_structured_mesh("lshape", 4), [0, 5, 7])
    path = tmp_path / "mesh.txt"
    write_mesh(m, path)
    back = read_mesh(path)
    assert back.same_as(m)
    np.testing.assert_array_equal(back.generation, m.generation)


def test_mesh_arrays_are_read_only():
    m = build_structured_mesh("square", 2)
    with pytest.raises(ValueError):
        m.vertices[0, 0] = 5.0
