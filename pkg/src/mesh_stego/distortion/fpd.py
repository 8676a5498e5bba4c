"""
Feature-preserving distortion.

ofpd_cost rebuilds every tensor of the perturbed mesh; the IFPD table only
recomputes tensors inside each vertex's influence domain and splices them into
the cached cover features. Both sum the L1 residual difference left to right
over (r1, r2, r3) in index order, so untouched entries contribute exact zeros
and the two agree bit for bit.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from mesh_stego.core.metrics import COST_ROWS, COST_TABLE_DURATION
from mesh_stego.features.eigen import eigen_sets, eigvalsh3
from mesh_stego.features.geometry import face_normals_areas, normals_from_corners
from mesh_stego.features.smoothing import laplacian_smooth
from mesh_stego.features.tensors import (
    PATTERNS,
    accumulate_tensors,
    compute_tensor_field,
    gather_neighbors,
    influence_domain,
    log_residual,
    neighborhood_table,
)
from mesh_stego.mesh.mesh import Mesh

logger = logging.getLogger(__name__)

SUB_FEATURE_NAMES = {1: "s1", 2: "s2", 3: "s3"}


@dataclass
class CostTable:
    """Per (vertex, channel, step) costs; steps are integer multiples of 10^-k*."""
    costs: np.ndarray
    steps: np.ndarray
    k_star: int
    profile: str
    mu: float = 1.0
    # sub-feature name -> (min, max) used by normalization
    bounds: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    metadata: Dict[str, float] = field(default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return int(self.costs.shape[0])

    def channel(self, j: int) -> np.ndarray:
        return self.costs[:, j, :]


@dataclass
class FeatureCache:
    """Cover-side features reused by every perturbation."""
    mesh: Mesh
    normals: np.ndarray
    areas: np.ndarray
    smooth_iterations: int
    smooth_factor: float
    sets: Dict[int, np.ndarray]
    smoothed_sets: Dict[int, np.ndarray]
    residuals: Dict[int, np.ndarray]

    @classmethod
    def build(cls, mesh: Mesh, patterns: Iterable[int] = PATTERNS, smooth_iterations: int = 1,
              smooth_factor: float = 0.2) -> "FeatureCache":
        normals, areas, degenerate = face_normals_areas(mesh.vertices, mesh.faces)
        if degenerate.any():
            logger.info(f"{int(degenerate.sum())} degenerate faces carry zero weight")
        smoothed = laplacian_smooth(mesh, smooth_iterations, smooth_factor)
        s_normals, s_areas, _ = face_normals_areas(smoothed.vertices, smoothed.faces)
        sets, smoothed_sets, res = {}, {}, {}
        for p in patterns:
            sets[p] = compute_tensor_field(mesh, p, normals, areas).sets
            smoothed_sets[p] = compute_tensor_field(smoothed, p, s_normals, s_areas).sets
            res[p] = log_residual(sets[p], smoothed_sets[p])
        return cls(mesh, normals, areas, smooth_iterations, smooth_factor, sets, smoothed_sets, res)

    def ensure(self, pattern: int):
        if pattern in self.residuals:
            return
        smoothed = laplacian_smooth(self.mesh, self.smooth_iterations, self.smooth_factor)
        self.sets[pattern] = compute_tensor_field(self.mesh, pattern, self.normals, self.areas).sets
        self.smoothed_sets[pattern] = compute_tensor_field(smoothed, pattern).sets
        self.residuals[pattern] = log_residual(self.sets[pattern], self.smoothed_sets[pattern])


def step_size(k_star: int) -> float:
    return 10.0 ** k_star


def perturbed_value(coordinate: float, step: int, k_star: int) -> float:
    return coordinate + step / step_size(k_star)


def sequential_l1(diff: np.ndarray) -> np.ndarray:
    """Left-to-right sum of |diff| along the last axis."""
    a = np.abs(diff)
    if a.shape[-1] == 0:
        return np.zeros(a.shape[:-1])
    return np.cumsum(a, axis=-1)[..., -1]


# -- reference (full recomputation) ---------------------------------------

def ofpd_cost(mesh: Mesh, vertex: int, channel: int, step: int, k_star: int, pattern: int,
              cache: Optional[FeatureCache] = None, changes: Optional[Sequence[int]] = None,
              strict: bool = False) -> float:
    """
    Unnormalized ||S_k(M) - S_k(M~)||_1 with only coordinate (vertex, channel)
    moved by step * 10^-k*. The cover smoothing is reused for M~ unless `strict`.
    """
    if changes is not None and step not in set(int(c) for c in changes):
        raise ValueError(f"Step {step} is not in the change set")
    if cache is None:
        cache = FeatureCache.build(mesh, (pattern,))
    cache.ensure(pattern)
    v = np.array(mesh.vertices)
    v[vertex, channel] = perturbed_value(v[vertex, channel], step, k_star)
    stego = mesh.with_vertices(v)
    sets = compute_tensor_field(stego, pattern).sets
    if strict:
        smoothed = laplacian_smooth(stego, cache.smooth_iterations, cache.smooth_factor)
        smoothed_sets = compute_tensor_field(smoothed, pattern).sets
    else:
        smoothed_sets = cache.smoothed_sets[pattern]
    diff = log_residual(sets, smoothed_sets) - cache.residuals[pattern]
    return float(sequential_l1(diff.ravel()))


def ofpd_rows(mesh: Mesh, steps: Sequence[int], k_star: int, pattern: int,
              vertices: Optional[Sequence[int]] = None, cache: Optional[FeatureCache] = None,
              strict: bool = False) -> np.ndarray:
    """Raw reference costs (len(vertices), 3, |steps|)."""
    if cache is None:
        cache = FeatureCache.build(mesh, (pattern,))
    vertices = range(mesh.n_vertices) if vertices is None else vertices
    rows = []
    for v in vertices:
        row = np.empty((3, len(steps)))
        for j in range(3):
            for d, step in enumerate(steps):
                row[j, d] = ofpd_cost(mesh, int(v), j, int(step), k_star, pattern, cache, strict=strict)
        rows.append(row)
    COST_ROWS.labels(method="strict" if strict else "ofpd").inc(len(rows))
    return np.array(rows).reshape(-1, 3, len(steps))


def strict_gap(mesh: Mesh, steps: Sequence[int], k_star: int, pattern: int, vertices: Sequence[int],
               cache: Optional[FeatureCache] = None) -> float:
    """Largest |strict - shared-smoothing| cost over the given vertices."""
    cache = cache or FeatureCache.build(mesh, (pattern,))
    shared = ofpd_rows(mesh, steps, k_star, pattern, vertices, cache)
    strict = ofpd_rows(mesh, steps, k_star, pattern, vertices, cache, strict=True)
    return float(np.max(np.abs(strict - shared))) if shared.size else 0.0


# -- influence-domain splicing -----------------------------------------------

def perturbed_ring(mesh: Mesh, vertex: int, steps: np.ndarray, k_star: int):
    """
    Normals and areas of the faces around `vertex` for every (channel, step)
    move: arrays (3*|steps|, R, 3) and (3*|steps|, R), with the sorted ring.
    """
    ring = mesh.one_ring_faces(vertex)
    base = mesh.vertices[vertex]
    n_steps = len(steps)
    positions = np.broadcast_to(base, (3, n_steps, 3)).copy()
    for j in range(3):
        positions[j, :, j] = perturbed_value(base[j], np.asarray(steps), k_star)
    positions = positions.reshape(3 * n_steps, 3)
    ring_faces = mesh.faces[ring]
    corners = np.broadcast_to(mesh.vertices[ring_faces], (positions.shape[0],) + ring_faces.shape + (3,)).copy()
    corners[:, ring_faces == vertex] = positions[:, None, :]
    normals, areas, _ = normals_from_corners(corners[:, :, 0], corners[:, :, 1], corners[:, :, 2])
    return ring, normals, areas


def splice_ring(rows: np.ndarray, ring: np.ndarray, base_normals: np.ndarray, base_areas: np.ndarray,
                ring_normals: np.ndarray, ring_areas: np.ndarray):
    """Neighbor normals/areas for padded face rows, with ring faces replaced per perturbation."""
    nn, na = gather_neighbors(base_normals, base_areas, rows)
    batch = ring_normals.shape[0]
    nn = np.broadcast_to(nn, (batch,) + nn.shape).copy()
    na = np.broadcast_to(na, (batch,) + na.shape).copy()
    if ring.size and rows.size:
        pos = np.minimum(np.searchsorted(ring, rows), ring.size - 1)
        hit = (rows >= 0) & (ring[pos] == rows)
        e_idx, s_idx = np.nonzero(hit)
        nn[:, e_idx, s_idx] = ring_normals[:, pos[e_idx, s_idx]]
        na[:, e_idx, s_idx] = ring_areas[:, pos[e_idx, s_idx]]
    return nn, na


def ifpd_vertex(cache: FeatureCache, vertex: int, steps: np.ndarray, k_star: int,
                patterns: Iterable[int]) -> Dict[int, np.ndarray]:
    """Raw costs (3, |steps|) of one vertex per pattern."""
    mesh = cache.mesh
    n_steps = len(steps)
    ring, ring_normals, ring_areas = perturbed_ring(mesh, vertex, steps, k_star)
    out = {}
    for p in patterns:
        domain = influence_domain(mesh, vertex, p)
        rows = neighborhood_table(mesh, p)[domain]
        nn, na = splice_ring(rows, ring, cache.normals, cache.areas, ring_normals, ring_areas)
        sets = eigen_sets(eigvalsh3(accumulate_tensors(nn, na)))
        r = log_residual(sets, cache.smoothed_sets[p][:, domain][:, None, :])
        diff = r - cache.residuals[p][:, domain][:, None, :]
        diff = diff.transpose(1, 0, 2).reshape(3 * n_steps, -1)
        out[p] = sequential_l1(diff).reshape(3, n_steps)
        out[p][:, steps == 0] = 0.0
    return out


def ifpd_raw_tables(mesh: Mesh, steps: Sequence[int], k_star: int, patterns: Iterable[int] = PATTERNS,
                    cache: Optional[FeatureCache] = None, threads: int = 1,
                    vertices: Optional[Sequence[int]] = None) -> Dict[int, np.ndarray]:
    """Unnormalized IFPD costs per pattern, each (len(vertices), 3, |steps|)."""
    patterns = tuple(patterns)
    if cache is None:
        cache = FeatureCache.build(mesh, patterns)
    for p in patterns:
        cache.ensure(p)
    steps = np.asarray(steps, dtype=np.int64)
    vertices = list(range(mesh.n_vertices)) if vertices is None else [int(v) for v in vertices]
    tables = {p: np.zeros((len(vertices), 3, len(steps))) for p in patterns}

    def run(v):
        return ifpd_vertex(cache, v, steps, k_star, patterns)

    if threads > 1 and len(vertices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run, vertices))
    else:
        results = [run(v) for v in vertices]
    for row, result in enumerate(results):
        for p in patterns:
            tables[p][row] = result[p]
    COST_ROWS.labels(method="ifpd").inc(len(vertices))
    return tables


def normalize(costs: np.ndarray) -> Tuple[np.ndarray, Tuple[float, float]]:
    """Global min-max to [0, 1]; constant input maps to 0."""
    costs = np.asarray(costs, dtype=np.float64)
    if costs.size == 0:
        return costs.copy(), (0.0, 0.0)
    lo, hi = float(costs.min()), float(costs.max())
    if hi == lo:
        return np.zeros_like(costs), (lo, hi)
    return (costs - lo) / (hi - lo), (lo, hi)


def ifpd_cost_table(mesh: Mesh, steps: Sequence[int], k_star: int, patterns: Iterable[int] = PATTERNS,
                    mu: float = 1.0, threads: int = 1, cache: Optional[FeatureCache] = None,
                    smooth_iterations: int = 1, smooth_factor: float = 0.2,
                    profile: Optional[str] = None) -> CostTable:
    """Normalized, summed and μ-scaled FPD over the chosen sub-features."""
    patterns = tuple(patterns)
    if 0 not in set(int(s) for s in steps):
        raise ValueError("Change set must contain 0")
    label = "cs" if len(patterns) > 1 else SUB_FEATURE_NAMES[patterns[0]]
    start = time.time()
    if cache is None:
        cache = FeatureCache.build(mesh, patterns, smooth_iterations, smooth_factor)
    raw = ifpd_raw_tables(mesh, steps, k_star, patterns, cache, threads)
    total = np.zeros((mesh.n_vertices, 3, len(steps)))
    bounds = {}
    for p in patterns:
        normalized, bounds[SUB_FEATURE_NAMES[p]] = normalize(raw[p])
        total += normalized
    total *= mu
    elapsed = time.time() - start
    COST_TABLE_DURATION.labels(method="ifpd", sub_feature=label).observe(elapsed)
    logger.info(f"IFPD-{label.upper()} table for {mesh.n_vertices} vertices x {len(steps)} steps in {elapsed:.2f}s")
    return CostTable(total, np.asarray(steps, dtype=np.int64), k_star, profile or f"ifpd-{label}", mu, bounds,
                     {"smooth_iterations": smooth_iterations, "smooth_factor": smooth_factor})
