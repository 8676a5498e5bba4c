"""
Per-face and per-vertex differential quantities.

Normals use an explicit component norm so that recomputing any subset of faces
reproduces the full computation bit for bit.
"""
from typing import Tuple

import numpy as np

from mesh_stego.mesh.mesh import Mesh

DEGENERATE_NORM = np.finfo(np.float64).tiny


def normals_from_corners(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unit normals, areas and degenerate flags for corner arrays of shape (..., 3)."""
    e1 = p1 - p0
    e2 = p2 - p0
    cx = e1[..., 1] * e2[..., 2] - e1[..., 2] * e2[..., 1]
    cy = e1[..., 2] * e2[..., 0] - e1[..., 0] * e2[..., 2]
    cz = e1[..., 0] * e2[..., 1] - e1[..., 1] * e2[..., 0]
    norm = np.sqrt(cx * cx + cy * cy + cz * cz)
    degenerate = norm <= DEGENERATE_NORM
    safe = np.where(degenerate, 1.0, norm)
    normals = np.stack([cx / safe, cy / safe, cz / safe], axis=-1)
    normals[degenerate] = 0.0
    areas = np.where(degenerate, 0.0, 0.5 * norm)
    return normals, areas, degenerate


def face_normals_areas(vertices: np.ndarray, faces: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    corners = vertices[faces]
    return normals_from_corners(corners[:, 0], corners[:, 1], corners[:, 2])


def face_normal_area(mesh: Mesh, face: int) -> Tuple[np.ndarray, float, bool]:
    if not 0 <= face < mesh.n_faces:
        raise IndexError(f"face {face} out of range")
    n, a, d = face_normals_areas(mesh.vertices, mesh.faces[face:face + 1])
    return n[0], float(a[0]), bool(d[0])


def angle_between(n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    """Angle in [0, pi] between vectors along the last axis."""
    cross = np.cross(n1, n2)
    sin = np.sqrt(np.sum(cross * cross, axis=-1))
    cos = np.sum(n1 * n2, axis=-1)
    return np.arctan2(sin, cos)


def dihedral_angles(mesh: Mesh, normals: np.ndarray = None) -> np.ndarray:
    """
    Angle between the two face normals of every interior edge, in [0, pi];
    coplanar faces give 0. Order follows `mesh.interior_edges`.
    """
    if normals is None:
        normals, _, _ = face_normals_areas(mesh.vertices, mesh.faces)
    interior = mesh.interior_edges
    return angle_between(normals[interior[:, 1]], normals[interior[:, 2]])


def vertex_normals(mesh: Mesh) -> np.ndarray:
    normals, areas, _ = face_normals_areas(mesh.vertices, mesh.faces)
    weighted = mesh.incidence.T @ (normals * areas[:, None])
    length = np.linalg.norm(weighted, axis=1)
    out = np.zeros_like(weighted)
    ok = length > 0
    out[ok] = weighted[ok] / length[ok, None]
    return out


def vertex_normal(mesh: Mesh, v: int) -> np.ndarray:
    faces = mesh.one_ring_faces(v)
    normals, areas, _ = face_normals_areas(mesh.vertices, mesh.faces[faces])
    weighted = (normals * areas[:, None]).sum(axis=0)
    length = np.linalg.norm(weighted)
    return weighted / length if length > 0 else np.zeros(3)


def corner_angles(mesh: Mesh) -> np.ndarray:
    """(F, 3) interior angle at each face corner."""
    c = mesh.vertices[mesh.faces]
    out = np.empty((mesh.n_faces, 3))
    for k in range(3):
        a = c[:, k]
        b = c[:, (k + 1) % 3] - a
        d = c[:, (k + 2) % 3] - a
        out[:, k] = angle_between(b, d)
    return out


def angle_defects(mesh: Mesh) -> np.ndarray:
    """2*pi minus the sum of incident corner angles, per vertex."""
    sums = np.bincount(mesh.faces.ravel(), weights=corner_angles(mesh).ravel(), minlength=mesh.n_vertices)
    return 2.0 * np.pi - sums


def gaussian_curvatures(mesh: Mesh) -> np.ndarray:
    """Angle defect over one third of the incident face area. Isolated vertices give 0."""
    _, areas, _ = face_normals_areas(mesh.vertices, mesh.faces)
    area = np.bincount(mesh.faces.ravel(), weights=np.repeat(areas, 3), minlength=mesh.n_vertices) / 3.0
    defect = angle_defects(mesh)
    out = np.zeros(mesh.n_vertices)
    ok = area > 0
    out[ok] = defect[ok] / area[ok]
    return out


def gaussian_curvature(mesh: Mesh, v: int) -> float:
    mesh._check_vertex(v)
    return float(gaussian_curvatures(mesh)[v])
