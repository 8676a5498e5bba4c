import numpy as np
import pytest
from scipy.special import entr

from mesh_stego.embedding.bmp import LayerState, advance, bmp_layer, candidate_bits, layer_entropies
from mesh_stego.embedding.changeset import (
    PRESETS,
    determine_q,
    normalize_steps,
    pad_changeset,
    parse_steps,
    preset_steps,
)
from mesh_stego.optimizer.gibbs import row_entropies


@pytest.mark.parametrize("size,q", [(2, 1), (3, 2), (4, 2), (5, 3), (13, 4), (16, 4), (17, 5)])
def test_determine_q(size, q):
    assert determine_q(size) == q


def test_determine_q_rejects_single_step():
    with pytest.raises(ValueError):
        determine_q(1)


def test_pad_three_steps():
    cs = pad_changeset([-1, 0, 1])
    assert cs.q == 2
    np.testing.assert_array_equal(cs.steps, [-1, 0, 1, 2])
    np.testing.assert_array_equal(cs.padded, [False, False, False, True])
    np.testing.assert_array_equal(cs.original, [-1, 0, 1])


def test_pad_thirteen_step_table():
    cs = pad_changeset(PRESETS["table"])
    assert cs.q == 4
    assert cs.size == 16
    np.testing.assert_array_equal(cs.steps, np.arange(-7, 9))
    np.testing.assert_array_equal(cs.steps[cs.padded], [-7, 7, 8])


def test_full_presets_need_no_padding():
    for name in ("1.5", "3", "4.5", "6"):
        cs = pad_changeset(PRESETS[name])
        assert not cs.padded.any()
        assert cs.size == 1 << cs.q


def test_steps_must_be_separable():
    with pytest.raises(ValueError):
        pad_changeset([0, 1, 4])
    with pytest.raises(ValueError):
        pad_changeset([0, 1, 2], q=1)
    with pytest.raises(ValueError):
        normalize_steps([1, 2])
    with pytest.raises(ValueError):
        normalize_steps([0, 1, 1])


def test_presets_and_parsing():
    assert preset_steps(1.5) == (0, 1)
    assert preset_steps(3.0) == (-1, 0, 1, 2)
    assert preset_steps(2.0) == (-1, 0, 1, 2)
    assert preset_steps(6) == tuple(range(-7, 9))
    with pytest.raises(ValueError):
        preset_steps(7.5)
    assert parse_steps("-1,0,1") == (-1, 0, 1)
    assert parse_steps(" -2..2 ") == (-2, -1, 0, 1, 2)
    assert parse_steps("table") == tuple(range(-6, 7))


def test_candidate_bits_use_twos_complement():
    bits = candidate_bits(np.array([-1, 4]), np.array([0, 1]), 1)
    np.testing.assert_array_equal(bits, [[1, 0], [0, 1]])
    high = candidate_bits(np.array([-1]), np.array([0]), 40)
    assert high[0, 0] == 1


def test_layer_probabilities_follow_the_change_tree():
    steps = np.array([-1, 0, 1, 2])
    probs = np.array([[1 / 3, 1 / 3, 1 / 3, 0.0]])
    integers = np.array([1])
    state = LayerState.initial(1, 2)
    p0 = bmp_layer(1, integers, steps, probs, state)
    assert p0[0] == pytest.approx(2 / 3)
    advance(1, integers, steps, probs, state, np.array([0]))
    np.testing.assert_array_equal(state.alive, [[True, False, True, False]])
    assert state.A[0, 0] == pytest.approx(2 / 3)
    p0 = bmp_layer(2, integers, steps, probs, state)
    assert p0[0] == pytest.approx(1 / 2)
    assert state.A[1, 0] == pytest.approx(2 / 3)


def test_layer_with_no_history_mass_falls_back():
    steps = np.array([-1, 0, 1, 2])
    probs = np.array([[0.0, 1.0, 0.0, 0.0]])
    integers = np.array([0])
    state = LayerState.initial(1, 2)
    advance(1, integers, steps, probs, state, np.array([1]))
    assert state.A[0, 0] == 0.0
    p0 = bmp_layer(2, integers, steps, probs, state)
    # live candidates -1 and 1 have second bits 1 and 0
    assert p0[0] == 0.5


def test_layer_entropies_sum_to_joint_entropy(rng):
    for q in (1, 2, 3, 4):
        cs = pad_changeset(range(-(1 << (q - 1)) + 1, 1 << (q - 1)) if q > 1 else (0, 1))
        probs = rng.dirichlet(np.ones(cs.size), size=1000)
        probs[:, cs.padded] = 0.0
        probs /= probs.sum(axis=1, keepdims=True)
        layers = layer_entropies(cs.steps, probs, cs.q)
        assert layers.shape == (cs.q, 1000)
        assert np.all(layers >= -1e-12)
        np.testing.assert_allclose(layers.sum(axis=0), row_entropies(probs), rtol=1e-10, atol=1e-12)


def test_first_layer_entropy_matches_bit_probability(rng):
    steps = np.arange(-3, 5)
    probs = rng.dirichlet(np.ones(8), size=200)
    integers = rng.integers(-1000, 1000, 200)
    p0 = bmp_layer(1, integers, steps, probs, LayerState.initial(200, 3))
    layers = layer_entropies(steps, probs, 3)
    np.testing.assert_allclose(entr(p0) + entr(1 - p0), layers[0], atol=1e-12)
