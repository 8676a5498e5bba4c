"""
Seeded synthetic meshes for fixtures, benchmarks and sweeps.

Every generator rounds coordinates to `decimals` places so the result is
exactly representable at that k*.
"""
from typing import Dict, Optional, Tuple

import numpy as np

from mesh_stego.mesh.mesh import Mesh


def _finish(vertices: np.ndarray, faces: np.ndarray, decimals: Optional[int]) -> Mesh:
    vertices = np.asarray(vertices, dtype=np.float64)
    if decimals is not None:
        vertices = np.round(vertices, decimals) + 0.0  # drop -0.0
    return Mesh(vertices, np.asarray(faces, dtype=np.int64))


def grid(nx: int = 8, ny: int = 8, spacing: float = 0.1, z: float = 0.0, jitter: float = 0.0,
         seed: int = 0, decimals: Optional[int] = 6) -> Mesh:
    """Planar (nx+1) x (ny+1) vertex grid in the plane z = const, split into triangles."""
    xs, ys = np.meshgrid(np.arange(nx + 1) * spacing, np.arange(ny + 1) * spacing, indexing="ij")
    vertices = np.column_stack([xs.ravel(), ys.ravel(), np.full(xs.size, z)])
    if jitter > 0:
        rng = np.random.default_rng(seed)
        interior = np.array([(i, j) for i in range(1, nx) for j in range(1, ny)], dtype=np.int64).reshape(-1, 2)
        ids = interior[:, 0] * (ny + 1) + interior[:, 1]
        vertices[ids, :2] += rng.uniform(-jitter, jitter, size=(ids.size, 2)) * spacing
    faces = []
    for i in range(nx):
        for j in range(ny):
            a = i * (ny + 1) + j
            b = (i + 1) * (ny + 1) + j
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return _finish(vertices, faces, decimals)


def random_surface(nx: int = 20, ny: int = 20, spacing: float = 0.05, amplitude: float = 0.05,
                   seed: int = 0, decimals: Optional[int] = 6) -> Mesh:
    """Height-field surface over a grid: smooth bumps plus small noise."""
    base = grid(nx, ny, spacing, decimals=None)
    rng = np.random.default_rng(seed)
    v = np.array(base.vertices)
    phase = rng.uniform(0, 2 * np.pi, size=3)
    freq = rng.uniform(1.0, 3.0, size=3)
    x, y = v[:, 0] / max(nx * spacing, 1e-12), v[:, 1] / max(ny * spacing, 1e-12)
    v[:, 2] = amplitude * (np.sin(2 * np.pi * freq[0] * x + phase[0]) * np.cos(2 * np.pi * freq[1] * y + phase[1])
                           + 0.5 * np.sin(2 * np.pi * freq[2] * (x + y) + phase[2]))
    v[:, 2] += rng.normal(0.0, amplitude * 0.05, size=v.shape[0])
    return _finish(v, base.faces, decimals)


def tetrahedron(decimals: Optional[int] = 6) -> Mesh:
    vertices = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]
    faces = [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)]
    return _finish(vertices, faces, decimals)


def fan(n: int = 5, closed: bool = False, radius: float = 1.0, decimals: Optional[int] = 6) -> Mesh:
    """Hub vertex 0 surrounded by n triangles. Open fans leave a gap between rim 1 and rim n+1."""
    rim = n if closed else n + 1
    span = 2 * np.pi if closed else np.pi * 1.5
    angles = np.arange(rim) * span / n
    vertices = np.vstack([[0.0, 0.0, 0.0], np.column_stack([radius * np.cos(angles), radius * np.sin(angles),
                                                            np.zeros(rim)])])
    faces = [(0, 1 + k, 1 + (k + 1) % rim) for k in range(n)]
    return _finish(vertices, faces, decimals)


def icosphere(subdivisions: int = 2, radius: float = 1.0, decimals: Optional[int] = 6) -> Mesh:
    """Subdivided icosahedron projected to the sphere: 10 * 4^s + 2 vertices."""
    t = (1.0 + 5 ** 0.5) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    points = [np.array(p, dtype=np.float64) / np.linalg.norm(p) for p in verts]
    for _ in range(subdivisions):
        cache: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in cache:
                m = points[a] + points[b]
                points.append(m / np.linalg.norm(m))
                cache[key] = len(points) - 1
            return cache[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    return _finish(np.array(points) * radius, faces, decimals)


def noisy_sphere(subdivisions: int = 2, noise: float = 0.02, seed: int = 0,
                 decimals: Optional[int] = 6) -> Mesh:
    base = icosphere(subdivisions, decimals=None)
    rng = np.random.default_rng(seed)
    v = np.array(base.vertices)
    v *= (1.0 + rng.normal(0.0, noise, size=(v.shape[0], 1)))
    return _finish(v, base.faces, decimals)
