import numpy as np

from mesh_stego.mesh.mesh import Mesh


def laplacian_smooth(mesh: Mesh, iterations: int = 1, factor: float = 0.2) -> Mesh:
    """Umbrella smoothing: v += factor * (mean of 1-ring neighbors - v). Isolated vertices stay put."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if not 0.0 < factor <= 1.0:
        raise ValueError("factor must be in (0, 1]")
    adjacency = mesh.vertex_neighbors_matrix
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    moving = degree > 0
    v = np.array(mesh.vertices)
    for _ in range(iterations):
        centroid = adjacency @ v
        centroid[moving] /= degree[moving, None]
        v[moving] += factor * (centroid[moving] - v[moving])
    return mesh.with_vertices(v)
