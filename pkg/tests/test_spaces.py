import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gooddeal.spaces import SampleSpace, YoungFunction, classify_density, expectation, luxemburg_norm

finite = st.floats(-5, 5, allow_nan=False)


def test_uniform_and_weights():
    sp = SampleSpace.from_weights([1, 3])
    assert np.allclose(sp.probs, [0.25, 0.75])
    assert SampleSpace.uniform(4).n == 4


def test_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        SampleSpace(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        SampleSpace(np.array([1.2, -0.2]))


def test_expectation_examples(coin):
    assert expectation(coin, [0.5, 0.5], [1, -1]) == 0.0
    assert expectation(coin, [0.25, 0.75], [4, 0]) == 1.0
    with pytest.raises(ValueError):
        expectation(coin, [0.5, 0.6], [1, 1])


def test_classify_density(coin):
    assert classify_density(coin, [0.5, 0.5]) == "equivalent"
    assert classify_density(coin, [1.0, 0.0]) == "absolutely_continuous"


@pytest.mark.parametrize("x, expected", [((2.0, 0.0), math.sqrt(2)), ((1.0, 1.0), 1.0), ((0.0, 0.0), 0.0)])
def test_square_norm_examples(coin, x, expected):
    assert luxemburg_norm(YoungFunction("power", 2.0), coin, x) == pytest.approx(expected, abs=1e-10)


def test_capped_norm_is_sup_norm(coin):
    assert luxemburg_norm(YoungFunction("capped"), coin, [3.0, -1.0]) == pytest.approx(3.0, rel=1e-10)


def test_exp_norm_solves_modular_equation():
    sp = SampleSpace.from_weights([1, 2, 1])
    phi = YoungFunction("exp", gamma=1.0)
    x = np.array([1.0, -0.5, 2.0])
    c = luxemburg_norm(phi, sp, x)
    assert sp.probs @ phi(x / c) == pytest.approx(1.0, abs=1e-9)


@given(st.lists(finite, min_size=3, max_size=3), st.floats(1.0, 4.0))
def test_power_norm_closed_form(xs, p):
    sp = SampleSpace.from_weights([1, 2, 3])
    x = np.array(xs)
    expected = float((sp.probs @ np.abs(x) ** p) ** (1 / p))
    assert luxemburg_norm(YoungFunction("power", p), sp, x) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=3, max_size=3),
       st.floats(-3, 3), st.sampled_from(["power", "exp", "capped"]))
def test_norm_axioms(xs, ys, lam, kind):
    sp = SampleSpace.from_weights([2, 1, 1])
    phi = YoungFunction(kind, p=1.5)
    x, y = np.array(xs), np.array(ys)
    nx, ny = luxemburg_norm(phi, sp, x), luxemburg_norm(phi, sp, y)
    assert luxemburg_norm(phi, sp, lam * x) == pytest.approx(abs(lam) * nx, rel=1e-8, abs=1e-10)
    assert luxemburg_norm(phi, sp, x + y) <= nx + ny + 1e-8 * (1 + nx + ny)


@given(st.lists(finite, min_size=2, max_size=2), st.lists(finite, min_size=2, max_size=2), st.floats(-3, 3))
def test_expectation_is_linear(xs, ys, a):
    sp = SampleSpace.uniform(2)
    q = [0.3, 0.7]
    lhs = expectation(sp, q, a * np.array(xs) + np.array(ys))
    assert lhs == pytest.approx(a * expectation(sp, q, xs) + expectation(sp, q, ys), abs=1e-9)
