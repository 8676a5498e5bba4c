"""
Embedding and extraction.

Per channel: integer map, Gibbs distribution over the padded change set, then
one binary STC pass per bitplane from the LSB upward, each driven by the
conditional bit probabilities of the layers already fixed. The realized step of
a vertex is the unique padded step whose low Q bits match the stego bits.
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mesh_stego.core.errors import CapacityError, ParamsMismatchError, StcError
from mesh_stego.core.metrics import PIPELINE_DURATION, STC_PASSES
from mesh_stego.distortion.fpd import CostTable
from mesh_stego.embedding.bmp import LayerState, advance, bmp_layer, layer_entropies
from mesh_stego.embedding.changeset import ChangeSet, pad_changeset
from mesh_stego.embedding.params import PARAMS_VERSION, StegoParams
from mesh_stego.mesh.mesh import Mesh
from mesh_stego.optimizer.gibbs import (
    LN2,
    ChangeDistribution,
    expected_distortion,
    max_entropy,
    solve_lambda,
    split_payload,
)
from mesh_stego.quant.domain import (
    CHANNELS,
    QuantizedChannel,
    choose_h_star,
    decimal_map,
    get_bitplane,
    integer_map,
)
from mesh_stego.stc.submatrix import build_submatrix, derive_seed
from mesh_stego.stc.trellis import stc_decode, stc_encode

logger = logging.getLogger(__name__)

WET_COST = 1e10
P_FLOOR = 1e-9


@dataclass
class ChannelReport:
    channel: str
    lam: float
    entropy_nats: float
    target_nats: float
    expected_distortion: float
    capacity_bits: List[int]
    msg_lens: List[int] = field(default_factory=list)
    change_counts: Dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "channel": self.channel,
            "lam": self.lam,
            "entropy_nats": self.entropy_nats,
            "target_nats": self.target_nats,
            "expected_distortion": self.expected_distortion,
            "capacity_bits": self.capacity_bits,
            "msg_lens": self.msg_lens,
            "change_counts": {str(k): v for k, v in self.change_counts.items()},
        }


@dataclass
class EmbedResult:
    stego: Mesh
    params: StegoParams
    stego_integers: np.ndarray
    deltas: np.ndarray
    channels: List[ChannelReport]
    probabilities: List[np.ndarray]
    elapsed: float = 0.0

    @property
    def expected_distortion(self) -> float:
        return sum(c.expected_distortion for c in self.channels)


@dataclass
class ChannelPlan:
    quantized: QuantizedChannel
    distribution: ChangeDistribution
    padded_probabilities: np.ndarray
    capacities: List[int]


def entropy_target(alpha_j: float, n_vertices: int, q: int, safety: float) -> float:
    """
    Nats per channel so the floored per-layer capacities, after the safety
    factor, still hold α_j·N bits.
    """
    return LN2 * (alpha_j * n_vertices + q + 1) / safety


def max_alpha(n_vertices: int, n_changes: int, q: int, safety: float) -> float:
    """Largest payload (bpv) whose per-channel targets stay below N·ln|I|."""
    if n_vertices == 0:
        return 0.0
    per_channel = (safety * n_vertices * math.log2(n_changes) - q - 1) / n_vertices
    return max(0.0, 3.0 * per_channel)


def pad_probabilities(probabilities: np.ndarray, change_set: ChangeSet) -> np.ndarray:
    out = np.zeros((probabilities.shape[0], change_set.size))
    out[:, ~change_set.padded] = probabilities
    return out


def layer_capacities(steps: np.ndarray, padded_probabilities: np.ndarray, q: int, safety: float) -> List[int]:
    """Message bits each layer can carry: floor(Σ_i H_l,i / ln 2 · s)."""
    per_layer = layer_entropies(steps, padded_probabilities, q).sum(axis=1)
    return [int(math.floor(h / LN2 * safety)) for h in per_layer]


def plan_channel(quantized: QuantizedChannel, costs: np.ndarray, change_set: ChangeSet, alpha_j: float,
                 safety: float) -> ChannelPlan:
    n = quantized.size
    target = entropy_target(alpha_j, n, change_set.q, safety)
    distribution = solve_lambda(costs, target)
    padded = pad_probabilities(distribution.probabilities, change_set)
    capacities = layer_capacities(change_set.steps, padded, change_set.q, safety)
    logger.info(f"[{quantized.channel}] λ={distribution.lam:.6g} H={distribution.entropy:.2f} nats, "
                f"layer capacities {capacities}")
    return ChannelPlan(quantized, distribution, padded, capacities)


def partition_message(n_bits: int, capacities: Sequence[Sequence[int]]) -> List[List[int]]:
    """Fill (channel, layer) slots in order x, y, z and LSB upward."""
    remaining = n_bits
    lens = []
    for row in capacities:
        out = []
        for cap in row:
            take = min(cap, remaining)
            out.append(take)
            remaining -= take
        lens.append(out)
    if remaining > 0:
        total = sum(sum(r) for r in capacities)
        raise CapacityError(f"Message of {n_bits} bits exceeds capacity of {total} bits", achievable_bits=total)
    return lens


def flip_costs_from_p0(p0: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reference bits (the more probable value) and the cost of flipping away from
    them: ln((1-p)/p) for the minority probability p, saturated when p = 0.
    """
    reference = (p0 < 0.5).astype(np.uint8)
    p_minor = np.minimum(p0, 1.0 - p0)
    clipped = np.clip(p_minor, P_FLOOR, 0.5)
    costs = np.log((1.0 - clipped) / clipped)
    costs = np.where(p_minor <= 0.0, WET_COST, costs)
    return reference, costs


def embed_channel(j: int, plan: ChannelPlan, change_set: ChangeSet, message: np.ndarray,
                  msg_lens: Sequence[int], stc_h: int, stc_seed: int) -> np.ndarray:
    """Layered embedding of one channel; returns the realized integer steps."""
    q = change_set.q
    v = plan.quantized.integers
    steps = change_set.steps
    probs = plan.padded_probabilities
    state = LayerState.initial(v.size, q)
    offset = 0
    for level in range(1, q + 1):
        p0 = bmp_layer(level, v, steps, probs, state)
        cover = get_bitplane(plan.quantized, level).bits
        m_len = msg_lens[level - 1]
        if m_len == 0:
            p_cover = np.where(cover == 0, p0, 1.0 - p0)
            stego = np.where(p_cover > 0.0, cover, 1 - cover).astype(np.uint8)
        else:
            reference, costs = flip_costs_from_p0(p0)
            sub = build_submatrix(stc_h, Fraction(m_len, v.size), derive_seed(stc_seed, j, level))
            stego = stc_encode(reference, costs, message[offset:offset + m_len], sub)
            offset += m_len
            STC_PASSES.labels(channel=CHANNELS[j]).inc()
        advance(level, v, steps, probs, state, stego)

    alive_count = state.alive.sum(axis=1)
    if np.any(alive_count != 1):
        raise StcError("Layered state does not resolve to a single step per vertex")
    chosen = np.argmax(state.alive, axis=1)
    if np.any(change_set.padded[chosen]):
        bad = int(np.sum(change_set.padded[chosen]))
        raise StcError(f"{bad} vertices landed on zero-probability filler steps; lower the payload")
    return steps[chosen]


def embed(mesh: Mesh, message_bits: np.ndarray, cost_table: CostTable, alpha: float, k_star: int,
          stc_h: int = 12, stc_seed: int = 0, safety: float = 0.95,
          alpha_split: Optional[Sequence[float]] = None, threads: int = 1) -> EmbedResult:
    start = time.time()
    bits = np.asarray(message_bits, dtype=np.uint8).ravel()
    n = mesh.n_vertices
    change_set = pad_changeset(cost_table.steps)
    if cost_table.n_vertices != n:
        raise ValueError("Cost table does not match the mesh")
    if cost_table.k_star != k_star:
        raise ValueError(f"Cost table built for k*={cost_table.k_star}, embedding at k*={k_star}")

    quantized = [integer_map(mesh, j, k_star) for j in range(3)]
    h_star = choose_h_star(quantized, change_set.steps, min_width=change_set.q + 1)
    quantized = [q.with_width(h_star) for q in quantized]
    plan = split_payload(alpha, alpha_split)

    ceiling = max_entropy(n, change_set.original.size)
    for j in range(3):
        if entropy_target(plan.per_channel[j], n, change_set.q, safety) >= ceiling:
            best = max_alpha(n, change_set.original.size, change_set.q, safety)
            raise CapacityError(
                f"Payload {alpha} bpv exceeds what {change_set.original.size} changes carry; "
                f"achievable alpha is {best:.4f} bpv", achievable_bpv=best, achievable_bits=best * n)

    plans = [plan_channel(quantized[j], cost_table.channel(j), change_set, plan.per_channel[j], safety)
             for j in range(3)]
    msg_lens = partition_message(bits.size, [p.capacities for p in plans])
    plan.msg_lens = msg_lens

    offsets = np.cumsum([0] + [sum(r) for r in msg_lens])

    def run(j: int) -> np.ndarray:
        return embed_channel(j, plans[j], change_set, bits[offsets[j]:offsets[j + 1]], msg_lens[j], stc_h, stc_seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=min(threads, 3)) as executor:
            deltas = list(executor.map(run, range(3)))
    else:
        deltas = [run(j) for j in range(3)]
    deltas = np.column_stack(deltas)

    coords = np.column_stack([decimal_map(quantized[j], deltas[:, j]) for j in range(3)])
    stego_integers = np.column_stack([quantized[j].integers + deltas[:, j] for j in range(3)])
    stego = mesh.with_vertices(coords)

    params = StegoParams(
        version=PARAMS_VERSION, k_star=k_star, h_star=h_star,
        changes=[int(s) for s in change_set.original], q=change_set.q,
        alpha=float(alpha), alpha_split=list(plan.per_channel), stc_h=stc_h, stc_seed=stc_seed,
        msg_lens=msg_lens, channel_order=list(CHANNELS), n_vertices=n,
    )
    reports = []
    for j, p in enumerate(plans):
        values, counts = np.unique(deltas[:, j], return_counts=True)
        reports.append(ChannelReport(
            CHANNELS[j], p.distribution.lam, p.distribution.entropy, p.distribution.target,
            expected_distortion(cost_table.channel(j), p.distribution.probabilities),
            p.capacities, msg_lens[j], {int(a): int(b) for a, b in zip(values, counts)}))
    elapsed = time.time() - start
    PIPELINE_DURATION.labels(operation="embed").observe(elapsed)
    logger.info(f"Embedded {bits.size} bits into {n} vertices in {elapsed:.2f}s")
    return EmbedResult(stego, params, stego_integers, deltas, reports,
                       [p.distribution.probabilities for p in plans], elapsed)


def extract(stego: Mesh, params: StegoParams) -> np.ndarray:
    """Message bits H·B~ for every (channel, layer) in the shared order."""
    start = time.time()
    n = stego.n_vertices
    if n != params.n_vertices:
        raise ParamsMismatchError(f"Params expect {params.n_vertices} vertices, mesh has {n}")
    chunks = []
    for name in params.channel_order:
        j = CHANNELS.index(name)
        q = integer_map(stego, j, params.k_star).with_width(params.h_star)
        for level in range(1, params.q + 1):
            m_len = params.msg_lens[j][level - 1]
            if m_len == 0:
                continue
            plane = get_bitplane(q, level).bits
            sub = build_submatrix(params.stc_h, Fraction(m_len, n), derive_seed(params.stc_seed, j, level))
            chunks.append(stc_decode(plane, sub, m_len))
    elapsed = time.time() - start
    PIPELINE_DURATION.labels(operation="extract").observe(elapsed)
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)


def change_frequency_z(deltas: np.ndarray, steps: Sequence[int], probabilities: Sequence[np.ndarray]) -> np.ndarray:
    """
    (3, |steps|) z-scores of realized per-step counts against the Gibbs
    expectation Σ_i π_i(step) with multinomial spread. A step with zero spread
    scores inf when its count misses the expectation.
    """
    steps = np.asarray(steps)
    out = np.zeros((len(probabilities), steps.size))
    for j, p in enumerate(probabilities):
        expected = p.sum(axis=0)
        spread = np.sqrt(np.sum(p * (1.0 - p), axis=0))
        observed = (deltas[:, j][:, None] == steps[None, :]).sum(axis=0)
        gap = np.abs(observed - expected)
        live = spread > 0
        out[j, live] = gap[live] / spread[live]
        out[j, ~live] = np.where(gap[~live] < 0.5, 0.0, np.inf)
    return out


def bytes_to_bits(data: bytes) -> np.ndarray:
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()
