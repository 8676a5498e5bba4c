import itertools
from fractions import Fraction

import numpy as np
import pytest

from mesh_stego.stc import (
    block_widths,
    build_submatrix,
    derive_seed,
    parity_check_matrix,
    stc_cost,
    stc_decode,
    stc_encode,
)


def test_block_widths():
    np.testing.assert_array_equal(block_widths(10, 3), [3, 3, 4])
    np.testing.assert_array_equal(block_widths(8, 8), np.ones(8))
    assert block_widths(1000, 333).sum() == 1000
    with pytest.raises(ValueError):
        block_widths(4, 5)
    with pytest.raises(ValueError):
        block_widths(4, 0)


def test_submatrix_shape_and_edges():
    sub = build_submatrix(7, Fraction(1, 3), seed=11)
    assert sub.width == 3
    assert sub.bits.shape == (7, 4)
    np.testing.assert_array_equal(sub.bits[0], 1)
    np.testing.assert_array_equal(sub.bits[-1], 1)
    again = build_submatrix(7, 1 / 3, seed=11)
    np.testing.assert_array_equal(sub.bits, again.bits)
    other = build_submatrix(7, Fraction(1, 3), seed=12)
    assert not np.array_equal(sub.bits[1:-1], other.bits[1:-1])


@pytest.mark.parametrize("height,rate", [(5, 0.5), (16, 0.5), (8, 0.0), (8, 1.5)])
def test_submatrix_rejects(height, rate):
    with pytest.raises(ValueError):
        build_submatrix(height, rate, seed=0)


def test_derive_seed():
    assert derive_seed(0, 0, 1) == derive_seed(0, 0, 1)
    assert len({derive_seed(0, j, level) for j in range(3) for level in range(1, 5)}) == 12
    assert derive_seed(1, 0, 1) != derive_seed(0, 0, 1)


def test_parity_check_matrix_is_banded():
    n, m, h = 20, 7, 6
    sub = build_submatrix(h, Fraction(m, n), seed=3)
    H = parity_check_matrix(n, m, sub).toarray()
    assert H.shape == (m, n)
    blocks = np.repeat(np.arange(m), block_widths(n, m))
    rows, cols = np.nonzero(H)
    assert np.all(rows >= blocks[cols])
    assert np.all(rows < blocks[cols] + h)
    # the first row of every block column is set, so H has full row rank
    assert np.all(H[blocks, np.arange(n)] == 1)


def test_encode_then_decode_fuzz(rng):
    for trial in range(60):
        n = int(rng.integers(10, 400))
        m = int(rng.integers(1, n + 1))
        h = int(rng.integers(6, 11))
        sub = build_submatrix(h, Fraction(m, n), seed=trial)
        x = rng.integers(0, 2, n).astype(np.uint8)
        costs = rng.exponential(1.0, n)
        msg = rng.integers(0, 2, m).astype(np.uint8)
        y = stc_encode(x, costs, msg, sub)
        np.testing.assert_array_equal(stc_decode(y, sub, m), msg)
        H = parity_check_matrix(n, m, sub)
        np.testing.assert_array_equal(np.asarray(H @ y.astype(np.int64)) % 2, msg)


def test_encoder_is_optimal_on_small_instances(rng):
    codewords = {}
    for trial in range(40):
        n = int(rng.integers(2, 17))
        m = int(rng.integers(1, n + 1))
        sub = build_submatrix(6, Fraction(m, n), seed=100 + trial)
        x = rng.integers(0, 2, n).astype(np.uint8)
        costs = rng.uniform(0.1, 5.0, n)
        msg = rng.integers(0, 2, m).astype(np.uint8)
        H = parity_check_matrix(n, m, sub).toarray()
        if n not in codewords:
            codewords[n] = np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.int64)
        words = codewords[n]
        ok = np.all((words @ H.T) % 2 == msg, axis=1)
        best = np.min((words[ok] != x) @ costs)
        y = stc_encode(x, costs, msg, sub)
        assert stc_cost(x, y, costs) == pytest.approx(best, abs=1e-9)


@pytest.mark.slow
def test_encode_satisfies_syndrome_on_many_instances(rng):
    for trial in range(10000):
        n = int(rng.integers(10, 200))
        m = int(rng.integers(1, n + 1))
        sub = build_submatrix(int(rng.integers(6, 10)), Fraction(m, n), seed=trial)
        x = rng.integers(0, 2, n).astype(np.uint8)
        msg = rng.integers(0, 2, m).astype(np.uint8)
        y = stc_encode(x, rng.exponential(1.0, n), msg, sub)
        H = parity_check_matrix(n, m, sub)
        np.testing.assert_array_equal(np.asarray(H @ y.astype(np.int64)) % 2, msg)
        if trial % 10 == 0:
            np.testing.assert_array_equal(stc_decode(y, sub, m), msg)


def test_cheaper_bit_never_raises_total_cost(rng):
    for trial in range(50):
        n = int(rng.integers(20, 150))
        m = int(rng.integers(1, n // 2 + 1))
        sub = build_submatrix(8, Fraction(m, n), seed=500 + trial)
        x = rng.integers(0, 2, n).astype(np.uint8)
        msg = rng.integers(0, 2, m).astype(np.uint8)
        costs = rng.uniform(0.1, 5.0, n)
        before = stc_cost(x, stc_encode(x, costs, msg, sub), costs)
        cheaper = costs.copy()
        cheaper[rng.integers(0, n)] *= rng.uniform(0.0, 1.0)
        after = stc_cost(x, stc_encode(x, cheaper, msg, sub), cheaper)
        assert after <= before + 1e-9


def test_empty_message_keeps_cover():
    x = np.array([1, 0, 1], dtype=np.uint8)
    sub = build_submatrix(6, 1.0, seed=0)
    np.testing.assert_array_equal(stc_encode(x, np.ones(3), np.zeros(0), sub), x)
    assert stc_decode(x, sub, 0).size == 0


def test_encode_rejects_bad_costs():
    sub = build_submatrix(6, 0.5, seed=0)
    x = np.zeros(4, dtype=np.uint8)
    with pytest.raises(ValueError):
        stc_encode(x, np.ones(3), np.ones(2), sub)
    with pytest.raises(ValueError):
        stc_encode(x, np.array([1.0, -1.0, 1.0, 1.0]), np.ones(2), sub)
    with pytest.raises(ValueError):
        stc_decode(x, sub, 5)


def test_zero_cost_bits_absorb_changes():
    n, m = 64, 16
    sub = build_submatrix(8, Fraction(m, n), seed=9)
    x = np.zeros(n, dtype=np.uint8)
    costs = np.full(n, 1e6)
    free = np.arange(0, n, 2)
    costs[free] = 0.0
    msg = np.ones(m, dtype=np.uint8)
    y = stc_encode(x, costs, msg, sub)
    changed = np.flatnonzero(y != x)
    assert set(changed) <= set(free)


@pytest.mark.slow
def test_constant_cost_efficiency_at_half_rate(rng):
    n, m = 10000, 5000
    sub = build_submatrix(12, Fraction(m, n), seed=2024)
    x = rng.integers(0, 2, n).astype(np.uint8)
    msg = rng.integers(0, 2, m).astype(np.uint8)
    y = stc_encode(x, np.ones(n), msg, sub)
    np.testing.assert_array_equal(stc_decode(y, sub, m), msg)
    assert np.count_nonzero(y != x) / m <= 0.30
