import math

import numpy as np
import pytest

from mesh_stego.core.errors import CapacityError
from mesh_stego.optimizer.gibbs import (
    entropy,
    entropy_floor,
    expected_distortion,
    gibbs,
    max_entropy,
    row_entropies,
    solve_lambda,
    split_payload,
)


def test_split_payload_is_exact():
    plan = split_payload(3.0)
    assert sum(plan.per_channel) == 3.0
    assert plan.per_channel[0] == plan.per_channel[1] == 1.0
    weighted = split_payload(3.0, (1, 1, 2))
    assert weighted.per_channel == (0.75, 0.75, 1.5)
    odd = split_payload(0.1)
    assert odd.per_channel[2] == 0.1 - (odd.per_channel[0] + odd.per_channel[1])


@pytest.mark.parametrize("alpha,weights", [(0.0, None), (-1.0, None), (1.0, (1, 1)), (1.0, (1, -1, 1)), (1.0, (0, 0, 0))])
def test_split_payload_rejects(alpha, weights):
    with pytest.raises(ValueError):
        split_payload(alpha, weights)


def test_gibbs_rows_are_distributions(rng):
    costs = rng.uniform(0, 1, size=(30, 4))
    p = gibbs(costs, 3.0)
    np.testing.assert_allclose(p.sum(axis=1), 1.0)
    order = np.argsort(costs, axis=1)
    ranked = np.take_along_axis(p, order, axis=1)
    assert np.all(np.diff(ranked, axis=1) <= 0)


def test_solve_lambda_meets_target(rng):
    costs = rng.uniform(0, 1, size=(200, 4))
    costs[:, 1] = 0.0
    target = 0.5 * max_entropy(200, 4)
    dist = solve_lambda(costs, target)
    assert abs(dist.entropy - target) <= 1e-6 * target
    assert dist.lam > 0
    assert dist.entropy_bits == pytest.approx(dist.entropy / math.log(2))


def test_gibbs_minimizes_distortion_at_fixed_entropy(rng):
    costs = rng.uniform(0, 1, size=(100, 4))
    costs[:, 0] = 0.0
    best = solve_lambda(costs, 0.4 * max_entropy(100, 4))
    floor = expected_distortion(costs, best.probabilities)
    for _ in range(20):
        noisy = costs + rng.normal(0.0, 0.3, size=costs.shape)
        other = solve_lambda(noisy, best.entropy)
        slack = abs(other.entropy - best.entropy) / best.lam + 1e-9
        assert expected_distortion(costs, other.probabilities) >= floor - slack


def test_scaling_costs_scales_lambda(rng):
    costs = rng.uniform(0, 1, size=(80, 5))
    target = 0.5 * max_entropy(80, 5)
    base = solve_lambda(costs, target)
    scaled = solve_lambda(3.7 * costs, target)
    assert scaled.lam == pytest.approx(base.lam / 3.7, rel=1e-6)
    np.testing.assert_allclose(scaled.probabilities, base.probabilities, rtol=0, atol=1e-8)


def test_two_change_closed_form():
    c = 0.7
    costs = np.tile([0.0, c], (100, 1))
    p = 0.2
    target = 100 * -(p * math.log(p) + (1 - p) * math.log(1 - p))
    dist = solve_lambda(costs, target)
    expected = math.log((1 - p) / p) / c
    assert abs(dist.lam - expected) <= 1e-9 * expected
    np.testing.assert_allclose(dist.probabilities[:, 1], p, atol=1e-9)


def test_entropy_is_monotone_in_lambda(rng):
    costs = rng.exponential(1.0, size=(50, 5))
    values = [entropy(gibbs(costs, lam)) for lam in np.linspace(0.0, 40.0, 100)]
    assert np.all(np.diff(values) <= 1e-12)
    assert values[0] == pytest.approx(max_entropy(50, 5))


def test_target_at_ceiling_raises():
    costs = np.zeros((10, 4))
    with pytest.raises(CapacityError) as err:
        solve_lambda(costs, max_entropy(10, 4))
    assert err.value.achievable_bits == pytest.approx(20.0)
    with pytest.raises(ValueError):
        solve_lambda(costs, 0.0)


def test_uniform_costs_give_uniform_distribution():
    dist = solve_lambda(np.ones((10, 4)), 5.0)
    assert dist.lam == 0.0
    np.testing.assert_allclose(dist.probabilities, 0.25)


def test_saturates_when_target_below_floor():
    costs = np.tile([0.0, 0.0, 1.0, 2.0], (20, 1))
    floor = entropy_floor(costs)
    assert floor == pytest.approx(20 * math.log(2))
    dist = solve_lambda(costs, 0.5 * floor)
    assert dist.lam > 0
    assert dist.entropy == pytest.approx(floor, rel=1e-9)


def test_row_entropies_and_distortion():
    p = np.array([[0.5, 0.5, 0.0], [1.0, 0.0, 0.0]])
    np.testing.assert_allclose(row_entropies(p), [math.log(2), 0.0])
    assert expected_distortion(np.array([[0.0, 2.0, 4.0], [1.0, 1.0, 1.0]]), p) == 2.0
