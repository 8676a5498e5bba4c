import numpy as np
import pytest

from mesh_stego.mesh import generators
from mesh_stego.mesh.mesh import Mesh, padded_rows


def test_tetrahedron_adjacency(tetra):
    np.testing.assert_array_equal(tetra.one_ring_faces(0), [0, 1, 2])
    np.testing.assert_array_equal(tetra.one_ring_faces(3), [1, 2, 3])
    assert tetra.edges.shape == (6, 2)
    assert tetra.interior_edges.shape == (6, 3)
    for f in range(4):
        others = [g for g in range(4) if g != f]
        np.testing.assert_array_equal(tetra.edge_adjacent_faces(f), others)
        np.testing.assert_array_equal(tetra.vertex_adjacent_faces(f), others)
    np.testing.assert_array_equal(tetra.vertex_neighbors(2), [0, 1, 3])


def test_open_fan_boundary():
    mesh = generators.fan(5)
    assert mesh.n_vertices == 7
    np.testing.assert_array_equal(mesh.one_ring_faces(0), [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(mesh.edge_adjacent_faces(0), [1])
    np.testing.assert_array_equal(mesh.edge_adjacent_faces(2), [1, 3])
    np.testing.assert_array_equal(mesh.vertex_adjacent_faces(0), [1, 2, 3, 4])
    np.testing.assert_array_equal(mesh.vertex_neighbors(0), [1, 2, 3, 4, 5, 6])
    assert mesh.edges.shape[0] == 11
    assert mesh.interior_edges.shape[0] == 4


def test_closed_fan_wraps():
    mesh = generators.fan(6, closed=True)
    np.testing.assert_array_equal(mesh.edge_adjacent_faces(0), [1, 5])
    assert mesh.interior_edges.shape[0] == 6


def test_grid_interior_valence():
    mesh = generators.grid(2, 2)
    assert mesh.n_vertices == 9
    assert mesh.n_faces == 8
    assert mesh.one_ring_faces(4).size == 6
    assert mesh.vertex_neighbors(4).size == 6
    np.testing.assert_array_equal(mesh.vertex_face_counts.sum(), 3 * mesh.n_faces)


def test_closed_sphere_edges_all_interior(small_sphere):
    assert small_sphere.n_vertices == 42
    assert small_sphere.edges.shape[0] == 120
    assert small_sphere.interior_edges.shape[0] == 120
    assert np.all((small_sphere.edge_face_table >= 0).sum(axis=1) == 2)


def test_padded_rows():
    import scipy.sparse as sp
    m = sp.csr_matrix(np.array([[0, 1, 1], [0, 0, 0], [1, 0, 0]]))
    np.testing.assert_array_equal(padded_rows(m), [[1, 2], [-1, -1], [0, -1]])


def test_invalid_faces():
    with pytest.raises(ValueError):
        Mesh(np.zeros((3, 3)), [[0, 1, 3]])
    with pytest.raises(ValueError):
        Mesh(np.zeros((3, 3)), [[0, 1, 1]])


def test_queries_check_range(tetra):
    with pytest.raises(IndexError):
        tetra.one_ring_faces(4)
    with pytest.raises(IndexError):
        tetra.edge_adjacent_faces(-1)


def test_arrays_are_read_only(tetra):
    with pytest.raises(ValueError):
        tetra.vertices[0, 0] = 5.0


def test_with_vertices_shares_topology(tetra):
    edges = tetra.edges
    table = tetra.vertex_face_table
    moved = tetra.with_vertices(np.asarray(tetra.vertices) * 2.0)
    assert moved.edges is edges
    assert moved.vertex_face_table is table
    np.testing.assert_array_equal(moved.vertices[1], [2.0, 0.0, 0.0])
