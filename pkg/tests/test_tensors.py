import numpy as np
import pytest

from mesh_stego.features.eigen import eigen_sets, eigvalsh3
from mesh_stego.features.geometry import face_normals_areas
from mesh_stego.features.tensors import (
    RESIDUAL_EPS,
    accumulate_tensors,
    compute_tensor_field,
    gather_neighbors,
    influence_domain,
    log_residual,
    neighborhood_table,
    residuals,
)
from mesh_stego.mesh import generators


def test_pattern_sizes(small_sphere):
    assert compute_tensor_field(small_sphere, 1).size == small_sphere.n_vertices
    assert compute_tensor_field(small_sphere, 2).size == small_sphere.n_faces
    assert compute_tensor_field(small_sphere, 3).size == small_sphere.n_faces
    with pytest.raises(ValueError):
        neighborhood_table(small_sphere, 4)


def test_flat_patch_is_rank_one(flat_grid):
    for pattern in (1, 2, 3):
        field = compute_tensor_field(flat_grid, pattern)
        assert np.all(field.sets[0] > 0.0)
        np.testing.assert_array_equal(field.sets[1], 0.0)
        np.testing.assert_array_equal(field.sets[2], 0.0)


def test_largest_face_has_unit_weight():
    normals = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    areas = np.array([2.0, 1.0])
    rows = np.array([[0, 1, -1]])
    nn, na = gather_neighbors(normals, areas, rows)
    np.testing.assert_array_equal(na, [[2.0, 1.0, 0.0]])
    np.testing.assert_array_equal(nn[0, 2], [0.0, 0.0, 0.0])
    t = accumulate_tensors(nn, na)
    np.testing.assert_array_equal(t[0], np.diag([0.0, 0.0, 1.5]))


def test_empty_neighborhood_gives_zero_tensor():
    t = accumulate_tensors(np.zeros((4, 0, 3)), np.zeros((4, 0)))
    np.testing.assert_array_equal(t, np.zeros((4, 3, 3)))


def test_tetrahedron_influence_domains(tetra):
    np.testing.assert_array_equal(influence_domain(tetra, 0, 1), [0, 1, 2, 3])
    np.testing.assert_array_equal(influence_domain(tetra, 0, 2), [0, 1, 2, 3])


def test_fan_influence_domains():
    mesh = generators.fan(5)
    np.testing.assert_array_equal(influence_domain(mesh, 3, 1), [0, 2, 3, 4])
    np.testing.assert_array_equal(influence_domain(mesh, 3, 2), [0, 1, 2, 3])
    np.testing.assert_array_equal(influence_domain(mesh, 1, 2), [0, 1])
    np.testing.assert_array_equal(influence_domain(mesh, 1, 3), [0, 1, 2, 3, 4])


@pytest.mark.parametrize("pattern", [1, 2, 3])
def test_influence_domain_covers_every_changed_tensor(sphere, pattern):
    base = compute_tensor_field(sphere, pattern).sets
    for v in (0, 17, 100):
        moved = np.array(sphere.vertices)
        moved[v] += [0.003, -0.002, 0.004]
        sets = compute_tensor_field(sphere.with_vertices(moved), pattern).sets
        changed = np.flatnonzero(np.any(sets != base, axis=0))
        assert set(changed) <= set(influence_domain(sphere, v, pattern))


def test_partial_recompute_matches_full_field(sphere):
    normals, areas, _ = face_normals_areas(sphere.vertices, sphere.faces)
    full = compute_tensor_field(sphere, 3, normals, areas).sets
    domain = influence_domain(sphere, 5, 3)
    table = neighborhood_table(sphere, 3)
    nn, na = gather_neighbors(normals, areas, table[domain])
    partial = eigen_sets(eigvalsh3(accumulate_tensors(nn, na)))
    np.testing.assert_allclose(partial, full[:, domain], rtol=0, atol=1e-12)


def test_residuals():
    sets = np.array([[1.0, 2.0], [0.0, 0.5], [0.0, 0.0]])
    np.testing.assert_array_equal(log_residual(sets, sets), np.full((3, 2), np.log(RESIDUAL_EPS)))


def test_residual_fields_must_match(small_sphere):
    a = compute_tensor_field(small_sphere, 1)
    b = compute_tensor_field(small_sphere, 2)
    with pytest.raises(ValueError):
        residuals(a, b)
    r = residuals(a, a)
    assert r.values.shape == (3, small_sphere.n_vertices)
