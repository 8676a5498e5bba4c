"""
Normal voting tensors, their eigenvalue feature sets and log residuals.

Patterns:
  1  per vertex, faces incident to the vertex
  2  per face, faces sharing an edge with it
  3  per face, faces sharing at least one vertex with it
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from mesh_stego.features.eigen import eigen_sets, eigvalsh3
from mesh_stego.features.geometry import face_normals_areas
from mesh_stego.mesh.mesh import Mesh

PATTERNS = (1, 2, 3)
RESIDUAL_EPS = 1e-12


@dataclass(frozen=True)
class TensorField:
    pattern: int
    tensors: np.ndarray
    eigenvalues: np.ndarray
    # (3, N) rows: λ1-λ2, λ2-λ3, λ3
    sets: np.ndarray

    @property
    def size(self) -> int:
        return int(self.sets.shape[1])


@dataclass(frozen=True)
class ResidualField:
    pattern: int
    # (3, N) rows r1, r2, r3
    values: np.ndarray


def neighborhood_table(mesh: Mesh, pattern: int) -> np.ndarray:
    if pattern == 1:
        return mesh.vertex_face_table
    if pattern == 2:
        return mesh.edge_adjacency
    if pattern == 3:
        return mesh.vertex_adjacency
    raise ValueError(f"Unknown tensor pattern {pattern}")


def gather_neighbors(normals: np.ndarray, areas: np.ndarray, rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Normals (..., W, 3) and areas (..., W) of the faces in padded rows; padding yields zeros."""
    valid = rows >= 0
    safe = np.where(valid, rows, 0)
    n = normals[safe]
    a = areas[safe]
    n[~valid] = 0.0
    a = np.where(valid, a, 0.0)
    return n, a


def accumulate_tensors(nbr_normals: np.ndarray, nbr_areas: np.ndarray) -> np.ndarray:
    """
    Σ_s w_s n_s n_sᵀ with w = area / (largest area in the neighborhood).
    Slots are added one at a time so each element's sum is independent of the batch.
    """
    width = nbr_areas.shape[-1]
    tensors = np.zeros(nbr_areas.shape[:-1] + (3, 3))
    if width == 0:
        return tensors
    amax = nbr_areas.max(axis=-1, keepdims=True)
    weights = np.where(amax > 0.0, nbr_areas / np.where(amax > 0.0, amax, 1.0), 0.0)
    for s in range(width):
        n = nbr_normals[..., s, :]
        tensors += weights[..., s, None, None] * (n[..., :, None] * n[..., None, :])
    return tensors


def field_from_tensors(pattern: int, tensors: np.ndarray) -> TensorField:
    eigenvalues = eigvalsh3(tensors)
    return TensorField(pattern, tensors, eigenvalues, eigen_sets(eigenvalues).reshape(3, -1))


def compute_tensor_field(mesh: Mesh, pattern: int, normals: Optional[np.ndarray] = None,
                         areas: Optional[np.ndarray] = None) -> TensorField:
    if normals is None or areas is None:
        normals, areas, _ = face_normals_areas(mesh.vertices, mesh.faces)
    table = neighborhood_table(mesh, pattern)
    nbr_normals, nbr_areas = gather_neighbors(normals, areas, table)
    return field_from_tensors(pattern, accumulate_tensors(nbr_normals, nbr_areas))


def log_residual(sets: np.ndarray, smoothed_sets: np.ndarray) -> np.ndarray:
    return np.log(np.abs(sets - smoothed_sets) + RESIDUAL_EPS)


def residuals(field: TensorField, smoothed_field: TensorField) -> ResidualField:
    if field.pattern != smoothed_field.pattern or field.sets.shape != smoothed_field.sets.shape:
        raise ValueError("Residuals need two fields of the same pattern and topology")
    return ResidualField(field.pattern, log_residual(field.sets, smoothed_field.sets))


def influence_domain(mesh: Mesh, v: int, pattern: int) -> np.ndarray:
    """Sorted indices of the pattern's tensors that can change when vertex v moves."""
    ring = mesh.one_ring_faces(v)
    if pattern == 1:
        return np.unique(mesh.faces[ring].ravel())
    table = neighborhood_table(mesh, pattern)
    touched = table[ring].ravel()
    return np.union1d(touched[touched >= 0], ring)
