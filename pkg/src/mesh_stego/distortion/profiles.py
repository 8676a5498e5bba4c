"""
Cost profiles selectable for embedding: IFPD variants, the flat VND and GCD
per-vertex profiles, and the dihedral-angle diagnostic.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from mesh_stego.core.config import PROFILES, Settings, get_settings
from mesh_stego.core.metrics import COST_ROWS, COST_TABLE_DURATION
from mesh_stego.distortion.fpd import CostTable, ifpd_cost_table, perturbed_ring
from mesh_stego.features.geometry import angle_between, dihedral_angles, face_normals_areas, gaussian_curvatures, vertex_normals
from mesh_stego.features.smoothing import laplacian_smooth
from mesh_stego.mesh.mesh import Mesh, padded_rows

logger = logging.getLogger(__name__)

IFPD_PATTERNS = {"ifpd-cs": (1, 2, 3), "ifpd-s1": (1,), "ifpd-s2": (2,), "ifpd-s3": (3,)}


def vnd_costs(mesh: Mesh, sigma: float = 1e-4, smooth_iterations: int = 1, smooth_factor: float = 0.2) -> np.ndarray:
    """1 / (log(||n_v - n_SM(v)|| + 1) + σ) per vertex."""
    smoothed = laplacian_smooth(mesh, smooth_iterations, smooth_factor)
    deviation = np.linalg.norm(vertex_normals(mesh) - vertex_normals(smoothed), axis=1)
    return 1.0 / (np.log(deviation + 1.0) + sigma)


def gcd_costs(mesh: Mesh, sigma: float = 1e-4, beta: float = 1.0) -> np.ndarray:
    """1 / (|K(v)|^β + σ) per vertex; |K| keeps saddle vertices finite and positive."""
    return 1.0 / (np.abs(gaussian_curvatures(mesh)) ** beta + sigma)


def vnd_cost(mesh: Mesh, v: int, sigma: float = 1e-4, smooth_iterations: int = 1, smooth_factor: float = 0.2) -> float:
    mesh._check_vertex(v)
    return float(vnd_costs(mesh, sigma, smooth_iterations, smooth_factor)[v])


def gcd_cost(mesh: Mesh, v: int, sigma: float = 1e-4, beta: float = 1.0) -> float:
    mesh._check_vertex(v)
    return float(gcd_costs(mesh, sigma, beta)[v])


def flat_table(per_vertex: np.ndarray, steps: Sequence[int]) -> np.ndarray:
    """Every nonzero step of a vertex costs the same; step 0 costs nothing."""
    steps = np.asarray(steps)
    table = np.repeat(np.asarray(per_vertex, dtype=np.float64)[:, None, None], 3, axis=1)
    table = np.repeat(table, steps.size, axis=2)
    table[:, :, steps == 0] = 0.0
    return table


def _face_edge_table(mesh: Mesh) -> np.ndarray:
    """Interior edges (rows of mesh.interior_edges) touching each face, padded with -1."""
    interior = mesh.interior_edges
    k = interior.shape[0]
    rows = np.concatenate([interior[:, 1], interior[:, 2]])
    cols = np.concatenate([np.arange(k), np.arange(k)])
    m = sp.coo_matrix((np.ones(2 * k), (rows, cols)), shape=(mesh.n_faces, k))
    return padded_rows(m)


def dihedral_rows(mesh: Mesh, steps: Sequence[int], k_star: int, threads: int = 1) -> np.ndarray:
    """
    Raw L1 change of the dihedral angles of interior edges next to each vertex's
    ring, per (vertex, channel, step).
    """
    steps = np.asarray(steps, dtype=np.int64)
    normals, _, _ = face_normals_areas(mesh.vertices, mesh.faces)
    interior = mesh.interior_edges
    angles = dihedral_angles(mesh, normals)
    face_edges = _face_edge_table(mesh)

    def run(v):
        ring, ring_normals, _ = perturbed_ring(mesh, v, steps, k_star)
        touched = face_edges[ring].ravel() if face_edges.shape[1] else np.zeros(0, dtype=np.int64)
        edges = np.unique(touched[touched >= 0])
        if edges.size == 0:
            return np.zeros((3, steps.size))
        fa, fb = interior[edges, 1], interior[edges, 2]
        batch = ring_normals.shape[0]
        na = np.broadcast_to(normals[fa], (batch, edges.size, 3)).copy()
        nb = np.broadcast_to(normals[fb], (batch, edges.size, 3)).copy()
        for src, dst in ((fa, na), (fb, nb)):
            pos = np.minimum(np.searchsorted(ring, src), ring.size - 1)
            hit = ring[pos] == src
            dst[:, hit] = ring_normals[:, pos[hit]]
        moved = angle_between(na, nb)
        row = np.abs(moved - angles[edges]).sum(axis=1).reshape(3, steps.size)
        row[:, steps == 0] = 0.0
        return row

    vertices = range(mesh.n_vertices)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(run, vertices))
    else:
        rows = [run(v) for v in vertices]
    COST_ROWS.labels(method="dihedral").inc(mesh.n_vertices)
    return np.array(rows).reshape(mesh.n_vertices, 3, steps.size)


def _mark_faceless(mesh: Mesh, table: CostTable) -> CostTable:
    """
    Vertices that no face uses move no normal, tensor or dihedral angle, so
    their rows under geometry-difference profiles are all zero.
    """
    faceless = int(mesh.n_vertices - np.unique(mesh.faces).size)
    table.metadata["faceless_vertices"] = faceless
    if faceless:
        logger.warning(f"{faceless} vertices belong to no face and cost nothing to change under {table.profile}")
    return table


def compute_cost_table(mesh: Mesh, steps: Sequence[int], k_star: int, profile: Optional[str] = None,
                       settings: Optional[Settings] = None, threads: Optional[int] = None) -> CostTable:
    """Dispatch to the selected profile using settings for μ, σ, β and smoothing."""
    settings = settings or get_settings()
    profile = profile or settings.profile
    threads = threads or settings.worker_count()
    if profile not in PROFILES:
        raise ValueError(f"Unknown profile '{profile}', expected one of {', '.join(PROFILES)}")
    steps = np.asarray(steps, dtype=np.int64)

    if profile in IFPD_PATTERNS:
        table = ifpd_cost_table(mesh, steps, k_star, IFPD_PATTERNS[profile], settings.mu, threads,
                                smooth_iterations=settings.smooth_iterations,
                                smooth_factor=settings.smooth_factor, profile=profile)
        return _mark_faceless(mesh, table)

    start = time.time()
    meta = {"sigma": settings.sigma, "beta": settings.beta}
    if profile == "vnd":
        costs = flat_table(vnd_costs(mesh, settings.sigma, settings.smooth_iterations, settings.smooth_factor), steps)
    elif profile == "gcd":
        costs = flat_table(gcd_costs(mesh, settings.sigma, settings.beta), steps)
    else:
        costs = dihedral_rows(mesh, steps, k_star, threads)
        meta = {}
    elapsed = time.time() - start
    COST_TABLE_DURATION.labels(method=profile, sub_feature="-").observe(elapsed)
    logger.info(f"{profile.upper()} table for {mesh.n_vertices} vertices in {elapsed:.2f}s")
    table = CostTable(costs, steps, k_star, profile, 1.0, {}, meta)
    return _mark_faceless(mesh, table) if profile == "dihedral" else table
