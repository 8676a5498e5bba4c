"""
Single-layer syndrome-trellis coding.

The encoder runs Viterbi over 2^h partial-syndrome states: column i XORs its
mask into the state when the stego bit is 1; at the end of block b the state's
low bit must equal m_b and is shifted out.
"""
import logging
import numpy as np
import scipy.sparse as sp

from mesh_stego.core.errors import StcError
from mesh_stego.stc.submatrix import Submatrix, block_widths

logger = logging.getLogger(__name__)


def _layout(n: int, m: int, sub: Submatrix):
    """Per-column block index and truncated mask."""
    widths = block_widths(n, m)
    if widths.max() > sub.bits.shape[1]:
        raise ValueError(f"Submatrix with {sub.bits.shape[1]} columns is too narrow for m={m}, n={n}")
    blocks = np.repeat(np.arange(m), widths)
    offsets = np.arange(n) - np.repeat(np.cumsum(widths) - widths, widths)
    masks = sub.column_masks[offsets]
    # rows at or beyond m are cut off
    keep = np.minimum(m - blocks, sub.height)
    masks = masks & ((np.int64(1) << keep) - 1)
    return widths, blocks, masks


def parity_check_matrix(n: int, m: int, sub: Submatrix) -> sp.csr_matrix:
    """Banded (m, n) binary H tiled from Ĥ, truncated at the bottom edge."""
    _, blocks, masks = _layout(n, m, sub)
    rows, cols = [], []
    for t in range(sub.height):
        on = np.flatnonzero((masks >> t) & 1)
        rows.append(blocks[on] + t)
        cols.append(on)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return sp.csr_matrix((np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(m, n))


def stc_decode(stego_bits: np.ndarray, sub: Submatrix, m: int) -> np.ndarray:
    """Syndrome H·y over GF(2)."""
    y = np.asarray(stego_bits, dtype=np.int64).ravel()
    if m == 0:
        return np.zeros(0, dtype=np.uint8)
    if m > y.size:
        raise ValueError(f"Message length {m} exceeds the {y.size} available bits")
    h = parity_check_matrix(y.size, m, sub)
    return (np.asarray(h @ y) % 2).astype(np.uint8)


def stc_encode(cover_bits: np.ndarray, flip_costs: np.ndarray, message: np.ndarray,
               sub: Submatrix) -> np.ndarray:
    """Minimum-cost stego bits y with H·y = message."""
    x = np.asarray(cover_bits, dtype=np.uint8).ravel()
    rho = np.asarray(flip_costs, dtype=np.float64).ravel()
    msg = np.asarray(message, dtype=np.uint8).ravel()
    n, m = x.size, msg.size
    if rho.size != n:
        raise ValueError("cover_bits and flip_costs differ in length")
    if m == 0:
        return x.copy()
    if np.any(rho < 0) or not np.all(np.isfinite(rho)):
        raise ValueError("Flip costs must be finite and nonnegative")

    widths, _, masks = _layout(n, m, sub)
    n_states = 1 << sub.height
    states = np.arange(n_states, dtype=np.int64)
    cost = np.full(n_states, np.inf)
    cost[0] = 0.0
    take_one = np.zeros((n, n_states), dtype=bool)
    tail = np.full(n_states // 2, np.inf)

    i = 0
    for b in range(m):
        for _ in range(widths[b]):
            c0 = cost + (rho[i] if x[i] else 0.0)
            c1 = cost[states ^ masks[i]] + (0.0 if x[i] else rho[i])
            take = c1 < c0
            take_one[i] = take
            cost = np.where(take, c1, c0)
            i += 1
        cost = np.concatenate([cost[int(msg[b])::2], tail])

    if not np.isfinite(cost[0]):
        raise StcError(f"Syndrome infeasible for m={m}, n={n}")

    y = np.empty(n, dtype=np.uint8)
    state = 0
    i = n
    for b in range(m - 1, -1, -1):
        state = (state << 1) | int(msg[b])
        for _ in range(widths[b]):
            i -= 1
            bit = take_one[i, state]
            y[i] = bit
            if bit:
                state ^= int(masks[i])
    return y


def stc_cost(cover_bits: np.ndarray, stego_bits: np.ndarray, flip_costs: np.ndarray) -> float:
    changed = np.asarray(cover_bits) != np.asarray(stego_bits)
    return float(np.sum(np.asarray(flip_costs, dtype=np.float64)[changed]))
