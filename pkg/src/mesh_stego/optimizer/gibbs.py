"""
Payload-limited sender: Gibbs change distributions π ∝ exp(-λρ) with λ chosen so
the total entropy (nats) meets the payload target.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import entr

from mesh_stego.core.errors import CapacityError
from mesh_stego.core.metrics import LAMBDA_ITERATIONS

logger = logging.getLogger(__name__)

MAX_BISECTIONS = 200
LAMBDA_CEILING = 1e300
LN2 = math.log(2.0)


@dataclass
class PayloadPlan:
    alpha: float
    per_channel: Tuple[float, float, float]
    # filled by the embedder: message bits per channel per layer
    msg_lens: List[List[int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "per_channel": list(self.per_channel), "msg_lens": self.msg_lens}


@dataclass
class ChangeDistribution:
    probabilities: np.ndarray
    lam: float
    entropy: float
    target: float

    @property
    def entropy_bits(self) -> float:
        return self.entropy / LN2


def split_payload(alpha: float, weights: Optional[Sequence[float]] = None) -> PayloadPlan:
    """Divide α over x, y, z; α_z absorbs rounding so the three sum to α exactly."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if weights is None:
        ax = ay = alpha / 3.0
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (3,) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("split weights must be three nonnegative numbers with a positive sum")
        w = w / w.sum()
        ax, ay = alpha * float(w[0]), alpha * float(w[1])
    az = alpha - (ax + ay)
    return PayloadPlan(alpha, (ax, ay, az))


def entropy(probabilities: np.ndarray) -> float:
    """Shannon entropy in nats, summed over all rows; 0 ln 0 = 0."""
    return float(np.sum(entr(np.asarray(probabilities, dtype=np.float64))))


def row_entropies(probabilities: np.ndarray) -> np.ndarray:
    return np.sum(entr(np.asarray(probabilities, dtype=np.float64)), axis=-1)


def max_entropy(n_vertices: int, n_changes: int) -> float:
    return n_vertices * math.log(n_changes)


def gibbs(costs: np.ndarray, lam: float) -> np.ndarray:
    shifted = costs - costs.min(axis=1, keepdims=True)
    weights = np.exp(-lam * shifted)
    return weights / weights.sum(axis=1, keepdims=True)


def entropy_floor(costs: np.ndarray) -> float:
    """Limit of the total entropy as λ grows: ties at the row minimum stay uniform."""
    ties = (costs == costs.min(axis=1, keepdims=True)).sum(axis=1)
    return float(np.sum(np.log(ties)))


def solve_lambda(costs: np.ndarray, target: float) -> ChangeDistribution:
    """
    Bisection on λ >= 0 for H(π_λ) = target nats. costs is (N, |I|) for one channel.
    Entropy is non-increasing in λ, so the bracket [0, hi] is grown by doubling first.
    """
    costs = np.asarray(costs, dtype=np.float64)
    n, d = costs.shape
    if target <= 0:
        raise ValueError("Entropy target must be > 0")
    ceiling = max_entropy(n, d)
    if target >= ceiling:
        raise CapacityError(
            f"Entropy target {target:.3f} nats is not below the maximum {ceiling:.3f} nats for {n} x {d} changes",
            achievable_bits=ceiling / LN2, achievable_bpv=ceiling / LN2 / max(n, 1))

    floor = entropy_floor(costs)
    if floor >= target:
        if np.all(costs == costs[:, :1]):
            probs = gibbs(costs, 0.0)
            return ChangeDistribution(probs, 0.0, entropy(probs), target)
        lam = 1.0
        while lam < LAMBDA_CEILING and entropy(gibbs(costs, lam)) - floor > 1e-12 * max(floor, 1.0):
            lam *= 2.0
        probs = gibbs(costs, lam)
        logger.warning(f"Entropy target {target:.4g} nats is below the reachable floor {floor:.4g}; using λ={lam:.4g}")
        return ChangeDistribution(probs, lam, entropy(probs), target)

    lo, hi = 0.0, 1.0
    while entropy(gibbs(costs, hi)) > target:
        lo = hi
        hi *= 2.0
        if hi > LAMBDA_CEILING:
            raise CapacityError("λ search diverged; costs too flat for the requested payload")

    iterations = 0
    for iterations in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        if entropy(gibbs(costs, mid)) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    LAMBDA_ITERATIONS.observe(iterations)
    lam = 0.5 * (lo + hi)
    probs = gibbs(costs, lam)
    achieved = entropy(probs)
    logger.debug(f"λ={lam:.10g} after {iterations} bisections, H={achieved:.6f} / {target:.6f} nats")
    return ChangeDistribution(probs, lam, achieved, target)


def expected_distortion(costs: np.ndarray, probabilities: np.ndarray) -> float:
    return float(np.sum(np.asarray(costs) * np.asarray(probabilities)))
