"""
Embedding domain: coordinates <-> fixed-point integers <-> bitplanes.

Signed integers are handled through an h*-bit two's-complement mask. Sender and
receiver apply the same mask, so bit l of (v + d) depends only on the low l bits
of v and d.
"""
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import Optional, Sequence, Union

import numpy as np

from mesh_stego.core.errors import QuantizationError
from mesh_stego.mesh.io import MAX_EXACT_INTEGER
from mesh_stego.mesh.mesh import Mesh

CHANNELS = ("x", "y", "z")
MAX_BIT_WIDTH = 62


def channel_index(channel: Union[int, str]) -> int:
    if isinstance(channel, str):
        if channel not in CHANNELS:
            raise ValueError(f"Unknown channel '{channel}'")
        return CHANNELS.index(channel)
    if channel not in (0, 1, 2):
        raise ValueError(f"Unknown channel {channel}")
    return int(channel)


@dataclass(frozen=True)
class QuantizedChannel:
    integers: np.ndarray
    k_star: int
    h_star: int
    channel: str

    @property
    def size(self) -> int:
        return int(self.integers.shape[0])

    def with_width(self, h_star: int) -> "QuantizedChannel":
        return QuantizedChannel(self.integers, self.k_star, h_star, self.channel)


@dataclass(frozen=True)
class Bitplane:
    level: int
    bits: np.ndarray


def _fraction_digits(token: str) -> int:
    try:
        d = Decimal(token.strip())
    except InvalidOperation:
        return 0
    if not d.is_finite() or d == 0:
        return 0
    exponent = d.normalize().as_tuple().exponent
    return max(0, -int(exponent))


def detect_k_star(mesh: Mesh) -> int:
    """Largest number of significant fractional digits over all coordinates."""
    if mesh.coordinate_text is not None:
        tokens = mesh.coordinate_text.ravel()
    else:
        tokens = [repr(float(v)) for v in mesh.vertices.ravel()]
    return max((_fraction_digits(t) for t in tokens), default=0)


def integer_map(mesh: Mesh, channel: Union[int, str], k_star: int, h_star: int = MAX_BIT_WIDTH) -> QuantizedChannel:
    """v̈ = round(v * 10^k*), exact from the source text when it is available."""
    if k_star < 0:
        raise ValueError("k* must be >= 0")
    j = channel_index(channel)
    if mesh.coordinate_text is not None:
        integers = np.array(
            [int(Decimal(t).scaleb(k_star).to_integral_value(ROUND_HALF_EVEN)) for t in mesh.coordinate_text[:, j]],
            dtype=object,
        )
        if integers.size and max(abs(int(x)) for x in integers) >= MAX_EXACT_INTEGER:
            raise QuantizationError(f"Coordinates overflow at k*={k_star}; lower k*")
        integers = integers.astype(np.int64)
    else:
        scaled = mesh.vertices[:, j] * (10.0 ** k_star)
        if scaled.size and np.max(np.abs(scaled)) >= MAX_EXACT_INTEGER:
            raise QuantizationError(f"Coordinates overflow at k*={k_star}; lower k*")
        integers = np.rint(scaled).astype(np.int64)
    return QuantizedChannel(integers, k_star, h_star, CHANNELS[j])


def signed_width(low: int, high: int) -> int:
    """Smallest two's-complement width holding every integer in [low, high]."""
    width = 1
    while not (-(1 << (width - 1)) <= low and high <= (1 << (width - 1)) - 1):
        width += 1
    return width


def choose_h_star(channels: Sequence[QuantizedChannel], steps: Sequence[int], min_width: int = 1) -> int:
    """Minimal width covering every cover value and every reachable stego value."""
    lo_step, hi_step = int(min(steps, default=0)), int(max(steps, default=0))
    lo = min(int(q.integers.min()) for q in channels if q.size) + min(lo_step, 0)
    hi = max(int(q.integers.max()) for q in channels if q.size) + max(hi_step, 0)
    width = max(signed_width(lo, hi), min_width)
    if width > MAX_BIT_WIDTH:
        raise QuantizationError(f"Stego values need {width} bits, more than {MAX_BIT_WIDTH}")
    return width


def masked_bits(q: QuantizedChannel) -> np.ndarray:
    return q.integers & ((1 << q.h_star) - 1)


def to_signed(masked: np.ndarray, h_star: int) -> np.ndarray:
    masked = np.asarray(masked, dtype=np.int64)
    return np.where(masked >= (1 << (h_star - 1)), masked - (1 << h_star), masked)


def get_bitplane(q: QuantizedChannel, level: int) -> Bitplane:
    if not 1 <= level <= q.h_star:
        raise ValueError(f"Bitplane level {level} outside [1, {q.h_star}]")
    bits = ((masked_bits(q) >> (level - 1)) & 1).astype(np.uint8)
    return Bitplane(level, bits)


def assemble(bitplanes: Sequence[Bitplane], high_bits: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Rebuild masked integers. Levels present in `bitplanes` replace the same levels
    of `high_bits`; every other level of `high_bits` is kept.
    """
    if high_bits is None:
        if not bitplanes:
            raise ValueError("Nothing to assemble")
        out = np.zeros(len(bitplanes[0].bits), dtype=np.int64)
    else:
        out = np.array(high_bits, dtype=np.int64)
    for plane in bitplanes:
        if plane.level < 1:
            raise ValueError(f"Bitplane level {plane.level} < 1")
        bit = 1 << (plane.level - 1)
        out = (out & ~bit) | (plane.bits.astype(np.int64) << (plane.level - 1))
    return out


def apply_changes(q: QuantizedChannel, steps: np.ndarray) -> np.ndarray:
    """Stego integers v̈ + δ·10^k*, checked against the signed h*-bit range."""
    stego = q.integers + np.asarray(steps, dtype=np.int64)
    lo, hi = -(1 << (q.h_star - 1)), (1 << (q.h_star - 1)) - 1
    if stego.size and (stego.min() < lo or stego.max() > hi):
        raise QuantizationError(f"Change set too wide for h*={q.h_star}")
    return stego


def decimal_map(q: QuantizedChannel, steps: np.ndarray) -> np.ndarray:
    """Stego coordinates ṽ = (v̈ + δ·10^k*) / 10^k*."""
    return apply_changes(q, steps) / (10.0 ** q.k_star)
