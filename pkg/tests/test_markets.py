import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from gooddeal.cases import fixtures, monotone_cap
from gooddeal.markets import (ConicalMarket, Friction, IlliquidCurve, Polytope, ScaledBox, extended_market,
                              market_from_dict)
from gooddeal.riskmeasures import rho_hat0_measure
from gooddeal.spaces import SampleSpace

seeds = st.integers(0, 100_000)


def random_polytope(seed):
    rng = np.random.default_rng(seed)
    n, J = rng.integers(2, 6), rng.integers(1, 6)
    return Polytope(SampleSpace(rng.dirichlet(np.ones(n))), rng.uniform(-2, 2, (J, n))), rng


def scipy_superhedge(G, x):
    """min r s.t. r + lambda @ G + x >= 0, lambda >= 0, sum lambda <= 1."""
    J, n = G.shape
    A = np.vstack([np.hstack([-np.ones((n, 1)), -G.T]), np.r_[0.0, np.ones(J)][None, :]])
    b = np.r_[x, 1.0]
    res = linprog(np.r_[1.0, np.zeros(J)], A_ub=A, b_ub=b, bounds=[(None, None)] + [(0, None)] * J,
                  method="highs")
    return res.fun


def test_illiquid_penalty_closed_form(illiquid):
    q = np.linspace(0, 1, 21)
    Q = np.column_stack([q, 1 - q])
    assert np.allclose(illiquid.support_function(Q), (2 * q - 1) ** 2 / 4, atol=1e-12)
    assert illiquid.support_function([0.75, 0.25]) == pytest.approx(1 / 16, abs=1e-12)


def test_illiquid_values(illiquid):
    x = np.array([-0.5, 0.0])
    assert illiquid.rho_hat0(x) == pytest.approx(0.3125, abs=1e-9)
    assert illiquid.superhedge(x) == pytest.approx(0.3125, abs=1e-9)
    assert illiquid.interval == pytest.approx((-0.5, 0.5))


def test_illiquid_membership_against_grid(illiquid):
    # alpha - alpha^2 never exceeds 1/4, so (0.3, -0.8) cannot be dominated
    assert not illiquid.contains([0.3, -0.8])
    assert illiquid.contains([0.25, -0.75])
    assert illiquid.contains([-1.0, -1.0])
    a = np.linspace(-2, 2, 400_001)
    curve = np.column_stack([a - a * a, -a - a * a])
    for x in ([0.3, -0.8], [0.2, -0.7], [0.1, 0.1], [-0.3, 0.0]):
        on_grid = bool(np.any(np.all(curve >= np.array(x) - 1e-6, axis=1)))
        assert illiquid.contains(x) == on_grid


@given(seeds)
def test_illiquid_penalty_matches_parameter_grid(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(2, 5)
    S = rng.uniform(-2, 2, n)
    fr = Friction(rng.choice(["quadratic", "exp"]), rng.uniform(0.2, 2))
    M = IlliquidCurve(SampleSpace(rng.dirichlet(np.ones(n))), S, fr)
    q = rng.dirichlet(np.ones(n))
    a = np.linspace(-10, 10, 200_001)
    brute = np.max(a * (q @ S) - fr(a))
    assert M.support_function(q) == pytest.approx(brute, abs=1e-6)


@given(seeds)
def test_polytope_support_and_superhedge_oracles(seed):
    M, rng = random_polytope(seed)
    q = rng.dirichlet(np.ones(M.n))
    assert M.support_function(q) == pytest.approx(max(0.0, float(np.max(M.generators @ q))), abs=1e-12)
    x = rng.uniform(-2, 2, M.n)
    assert M.superhedge(x) == pytest.approx(scipy_superhedge(M.generators, x), abs=1e-8)


@given(seeds, st.floats(0, 1))
def test_support_is_nonnegative_and_convex(seed, t):
    M, rng = random_polytope(seed)
    q1, q2 = rng.dirichlet(np.ones(M.n)), rng.dirichlet(np.ones(M.n))
    s1, s2 = M.support_function(q1), M.support_function(q2)
    assert min(s1, s2) >= 0.0
    assert M.support_function(t * q1 + (1 - t) * q2) <= t * s1 + (1 - t) * s2 + 1e-12


@given(seeds, st.floats(-3, 3))
def test_superhedge_cash_invariance_and_duality(seed, c):
    M, rng = random_polytope(seed)
    x = rng.uniform(-2, 2, M.n)
    r = M.superhedge(x)
    assert M.superhedge(x + c) == pytest.approx(r - c, abs=1e-8)
    assert M.rho_hat0(x) == pytest.approx(r, abs=1e-8)


def test_superhedged_claim_is_member():
    M, rng = random_polytope(3)
    x = rng.uniform(-2, 2, M.n)
    assert M.contains(-(x + M.superhedge(x)) - 1e-7)
    assert not M.contains(-(x + M.superhedge(x)) + 1e-3)


def test_scaled_box_values(half):
    assert half.rho_hat0(np.zeros(2)) == pytest.approx(-0.5, abs=1e-12)
    v, q = half.min_support()
    assert v == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(q, [0, 1])


def test_unbounded_market_values():
    M = monotone_cap(False)
    assert M.superhedge(np.zeros(2)) == -math.inf
    assert M.rho_hat0(np.zeros(2)) == -math.inf
    assert M.support_function([0.5, 0.5]) == math.inf


def test_two_sided_line_support():
    M = ScaledBox(SampleSpace.uniform(2), np.array([[1.0, -1.0]]), np.array([[-math.inf, math.inf]]))
    assert M.support_function([0.5, 0.5]) == 0.0
    assert M.support_function([0.6, 0.4]) == math.inf


def test_box_must_contain_zero():
    with pytest.raises(ValueError):
        ScaledBox(SampleSpace.uniform(2), np.ones((1, 2)), np.array([[0.5, 1.0]]))


def test_conical_support_takes_two_values(illiquid):
    C = ConicalMarket(illiquid)
    q = np.linspace(0, 1, 11)
    vals = C.support_function(np.column_stack([q, 1 - q]))
    assert set(np.unique(vals)) <= {0.0, math.inf}
    assert C.support_function([0.5, 0.5]) == 0.0
    assert C.rho_hat0([-0.5, 0.0]) == pytest.approx(0.25, abs=1e-9)


def test_extended_market_membership(illiquid):
    E = extended_market(rho_hat0_measure(illiquid))
    assert E.contains([0.25, -0.75])
    assert not E.contains([0.1, 0.0])
    assert list(E.contains_batch(np.array([[0.0, 0.0], [0.1, 0.1]]))) == [True, False]


@pytest.mark.parametrize("name", sorted(fixtures()))
def test_dict_round_trip(name):
    M = fixtures()[name]
    again = market_from_dict(M.space, M.to_dict())
    X = np.random.default_rng(0).uniform(-1, 1, (5, M.n))
    assert np.array_equal(M.superhedge(X), again.superhedge(X))
    assert again.to_dict() == M.to_dict()


def test_unknown_market_type():
    with pytest.raises(ValueError):
        market_from_dict(SampleSpace.uniform(2), {"type": "banana"})
