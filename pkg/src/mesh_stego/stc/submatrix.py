"""
STC submatrix Ĥ (h rows) and the block layout of the banded parity-check matrix.

Column block b of H starts at row b; its width is w or w+1 so that the widths
sum to n for any message length m <= n. Ĥ carries w+1 columns for the wider blocks.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

MIN_HEIGHT, MAX_HEIGHT = 6, 15


@dataclass(frozen=True)
class Submatrix:
    height: int
    width: int
    bits: np.ndarray
    seed: int

    @property
    def column_masks(self) -> np.ndarray:
        """Column c as an integer with bit t = row t."""
        weights = 1 << np.arange(self.height, dtype=np.int64)
        return (self.bits.astype(np.int64) * weights[:, None]).sum(axis=0)


def _as_fraction(rate: Union[float, Fraction]) -> Fraction:
    if isinstance(rate, Fraction):
        return rate
    return Fraction(rate).limit_denominator(10 ** 9)


def build_submatrix(height: int, rate: Union[float, Fraction], seed: int) -> Submatrix:
    """Pseudorandom Ĥ with every column's first and last bit set; w = floor(1/rate)."""
    if not MIN_HEIGHT <= height <= MAX_HEIGHT:
        raise ValueError(f"Submatrix height {height} outside [{MIN_HEIGHT}, {MAX_HEIGHT}]")
    rate = _as_fraction(rate)
    if not 0 < rate <= 1:
        raise ValueError(f"Rate {rate} outside (0, 1]")
    width = math.floor(1 / rate)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    bits = rng.integers(0, 2, size=(height, width + 1), dtype=np.uint8)
    bits[0, :] = 1
    bits[height - 1, :] = 1
    return Submatrix(height, width, bits, seed)


def block_widths(n: int, m: int) -> np.ndarray:
    """Column count of each of the m blocks: floor((b+1)n/m) - floor(bn/m)."""
    if m <= 0 or m > n:
        raise ValueError(f"Need 0 < m <= n, got m={m}, n={n}")
    edges = (np.arange(m + 1, dtype=np.int64) * n) // m
    return np.diff(edges)


def derive_seed(base_seed: int, *key: int) -> int:
    """Deterministic child seed for one (channel, layer) from the shared seed."""
    return int(np.random.SeedSequence([int(base_seed)] + [int(k) for k in key]).generate_state(1)[0])
