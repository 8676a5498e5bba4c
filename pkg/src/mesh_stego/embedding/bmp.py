"""
Layer-by-layer bit modification probabilities over the change tree.

The state tracks, per vertex, which padded steps are still consistent with the
stego bits fixed so far (`alive`) and their total mass (A[0]). Row l of A keeps
the layer-l conditional P(b~ = 0 | history) for diagnostics.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import entr


@dataclass
class LayerState:
    alive: np.ndarray
    A: np.ndarray

    @classmethod
    def initial(cls, n_vertices: int, q: int) -> "LayerState":
        alive = np.ones((n_vertices, 1 << q), dtype=bool)
        A = np.zeros((q + 1, n_vertices))
        A[0] = 1.0
        return cls(alive, A)


def candidate_bits(integers: np.ndarray, steps: np.ndarray, level: int) -> np.ndarray:
    """(N, |I|) bit `level` (1 = LSB) of v̈ + step, two's complement."""
    return ((integers[:, None] + steps[None, :]) >> (level - 1)) & 1


def bmp_layer(level: int, integers: np.ndarray, steps: np.ndarray, probabilities: np.ndarray,
              state: LayerState) -> np.ndarray:
    """P(stego bit at `level` = 0 | lower stego bits) per vertex."""
    bits = candidate_bits(integers, steps, level)
    live = probabilities * state.alive
    mass0 = np.sum(live * (bits == 0), axis=1)
    mass = state.A[0]
    # vertices whose history carries no mass fall back to counting live entries
    count_alive = state.alive.sum(axis=1)
    count0 = np.sum(state.alive & (bits == 0), axis=1)
    fallback = np.where(count_alive > 0, count0 / np.maximum(count_alive, 1), 0.5)
    p0 = np.where(mass > 0, mass0 / np.where(mass > 0, mass, 1.0), fallback)
    p0 = np.clip(p0, 0.0, 1.0)
    state.A[level] = p0
    return p0


def advance(level: int, integers: np.ndarray, steps: np.ndarray, probabilities: np.ndarray,
            state: LayerState, stego_bits: np.ndarray):
    """Keep only steps consistent with the chosen stego bits and update the history mass."""
    bits = candidate_bits(integers, steps, level)
    state.alive &= bits == np.asarray(stego_bits, dtype=np.int64)[:, None]
    state.A[0] = np.sum(probabilities * state.alive, axis=1)


def layer_entropies(steps: np.ndarray, probabilities: np.ndarray, q: int) -> np.ndarray:
    """
    (Q, N) conditional entropies H(b~(l) | b~(l-1..1)) in nats. Adding v̈ permutes
    residues, so grouping steps by residue mod 2^l gives the joint law of the low l bits.
    """
    steps = np.asarray(steps, dtype=np.int64)
    joint = np.zeros((q + 1, probabilities.shape[0]))
    for level in range(1, q + 1):
        modulus = 1 << level
        residues = steps % modulus
        masses = np.stack([probabilities[:, residues == r].sum(axis=1) for r in range(modulus)], axis=1)
        joint[level] = np.sum(entr(masses), axis=1)
    return np.diff(joint, axis=0)
