import numpy as np
import pytest

from mesh_stego.features.geometry import (
    angle_between,
    angle_defects,
    dihedral_angles,
    face_normal_area,
    face_normals_areas,
    gaussian_curvature,
    gaussian_curvatures,
    normals_from_corners,
    vertex_normal,
    vertex_normals,
)
from mesh_stego.features.smoothing import laplacian_smooth
from mesh_stego.mesh import generators
from mesh_stego.mesh.mesh import Mesh


def test_unit_triangle_normal_and_area():
    n, a, d = normals_from_corners(np.array([0.0, 0, 0]), np.array([1.0, 0, 0]), np.array([0.0, 1, 0]))
    np.testing.assert_array_equal(n, [0.0, 0.0, 1.0])
    assert a == 0.5
    assert not d


def test_degenerate_face_has_zero_normal():
    mesh = Mesh(np.array([[0.0, 0, 0], [1, 1, 1], [2, 2, 2]]), [[0, 1, 2]])
    n, a, d = face_normal_area(mesh, 0)
    np.testing.assert_array_equal(n, [0.0, 0.0, 0.0])
    assert a == 0.0
    assert d
    with pytest.raises(IndexError):
        face_normal_area(mesh, 1)


def test_angle_between():
    assert angle_between(np.array([1.0, 0, 0]), np.array([0.0, 1, 0])) == pytest.approx(np.pi / 2)
    assert angle_between(np.array([0.0, 0, 1]), np.array([0.0, 0, -1])) == pytest.approx(np.pi)
    assert angle_between(np.array([0.0, 0, 1]), np.array([0.0, 0, 1])) == 0.0


def test_planar_patch_has_flat_dihedrals(flat_grid):
    angles = dihedral_angles(flat_grid)
    assert angles.size == flat_grid.interior_edges.shape[0]
    assert np.max(np.abs(angles)) <= 1e-12


def test_tetrahedron_dihedrals_in_range(tetra):
    angles = dihedral_angles(tetra)
    assert angles.size == 6
    assert np.all((angles > 0) & (angles <= np.pi))


def test_gauss_bonnet_on_closed_sphere(sphere):
    assert np.sum(angle_defects(sphere)) == pytest.approx(4 * np.pi, abs=1e-9)


def test_flat_interior_has_no_curvature(flat_grid):
    defects = angle_defects(flat_grid)
    interior = [i * 5 + j for i in range(1, 4) for j in range(1, 4)]
    np.testing.assert_allclose(defects[interior], 0.0, atol=1e-12)
    np.testing.assert_allclose(gaussian_curvatures(flat_grid)[interior], 0.0, atol=1e-9)


def test_unit_sphere_curvature_near_one():
    mesh = generators.icosphere(3)
    _, areas, _ = face_normals_areas(mesh.vertices, mesh.faces)
    total = np.sum(gaussian_curvatures(mesh) * np.bincount(mesh.faces.ravel(), np.repeat(areas, 3)) / 3.0)
    assert total / areas.sum() == pytest.approx(1.0, rel=0.05)
    assert gaussian_curvature(mesh, 0) == pytest.approx(gaussian_curvatures(mesh)[0])


def test_vertex_normals_point_radially():
    mesh = generators.icosphere(2)
    normals = vertex_normals(mesh)
    radial = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    assert np.all(np.abs(np.sum(normals * radial, axis=1)) > 0.99)
    np.testing.assert_allclose(vertex_normal(mesh, 7), normals[7], atol=1e-12)


def test_smoothing_keeps_plane_and_fixes_isolated_vertices():
    mesh = generators.grid(3, 3, spacing=0.1, z=0.5, jitter=0.3, seed=2)
    v = np.vstack([mesh.vertices, [[9.0, 9.0, 9.0]]])
    mesh = Mesh(v, mesh.faces)
    smoothed = laplacian_smooth(mesh, iterations=3, factor=0.5)
    np.testing.assert_allclose(smoothed.vertices[:, 2][:-1], 0.5, atol=1e-12)
    np.testing.assert_array_equal(smoothed.vertices[-1], [9.0, 9.0, 9.0])
    assert not np.allclose(smoothed.vertices[:-1, :2], mesh.vertices[:-1, :2])


def test_smoothing_shrinks_sphere(sphere):
    smoothed = laplacian_smooth(sphere, 1, 0.2)
    assert np.mean(np.linalg.norm(smoothed.vertices, axis=1)) < np.mean(np.linalg.norm(sphere.vertices, axis=1))


@pytest.mark.parametrize("iterations,factor", [(0, 0.2), (1, 0.0), (1, 1.5)])
def test_smoothing_rejects_bad_arguments(tetra, iterations, factor):
    with pytest.raises(ValueError):
        laplacian_smooth(tetra, iterations, factor)
