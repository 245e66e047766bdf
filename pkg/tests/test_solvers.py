import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from gooddeal.solvers import (LinearProgram, bisect_root, golden_batch, maximize_concave_simplex,
                              minimize_convex_1d, solve_lp)


def test_lp_textbook_example():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    lp = LinearProgram([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18], maximize=True)
    res = solve_lp(lp)
    assert res.ok
    assert res.value == pytest.approx(36.0, abs=1e-9)
    assert np.allclose(res.x, [2, 6])
    assert res.dual_value == pytest.approx(36.0, abs=1e-9)


def test_lp_free_variables_and_equalities():
    # min x + y s.t. x - y = 1, x >= -3 free above, y free -> unbounded below
    res = solve_lp(LinearProgram([1, 1], A_eq=[[1, -1]], b_eq=[1], bounds=[(-3, None), (None, None)]))
    assert res.ok
    assert res.value == pytest.approx(-7.0)


def test_lp_infeasible_and_unbounded():
    assert solve_lp(LinearProgram([1], [[1]], [-1])).status == "infeasible"
    assert solve_lp(LinearProgram([-1], [[-1]], [0])).status == "unbounded"


def test_lp_rejects_malformed_input():
    with pytest.raises(ValueError):
        LinearProgram([1, 2], [[1, 2, 3]], [1])
    with pytest.raises(ValueError):
        LinearProgram([1], bounds=[(2, 1)])
    with pytest.raises(ValueError):
        LinearProgram([math.inf])


@given(st.integers(0, 10_000))
def test_lp_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 6), rng.integers(1, 6)
    A = rng.uniform(-2, 2, (m, n))
    b = rng.uniform(0, 3, m)
    c = rng.uniform(-2, 2, n)
    bounds = [(0, rng.uniform(0.5, 3)) if rng.random() < 0.7 else (-1, None) for _ in range(n)]
    ours = solve_lp(LinearProgram(c, A, b, bounds=bounds))
    # x = 0 is always feasible; HiGHS presolve can misreport unbounded problems as infeasible
    ref = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs-ds", options={"presolve": False})
    assert ref.status in (0, 3)
    if ref.status == 0:
        assert ours.ok
        assert ours.value == pytest.approx(ref.fun, abs=1e-8)
        assert ours.dual_value == pytest.approx(ours.value, abs=1e-8)
        assert np.all(A @ ours.x <= b + 1e-8)
    else:
        assert ours.status == "unbounded"


@pytest.mark.parametrize("f, bracket, argmin, value", [
    (lambda a: (a - 0.25) ** 2 + 5 / 16, (-1, 1), 0.25, 5 / 16),
    (lambda a: a * a - 0.5 * a, (-1, 1), 0.25, -1 / 16),
])
def test_golden_examples(f, bracket, argmin, value):
    x, v = minimize_convex_1d(f, bracket, tol=1e-12)
    assert x == pytest.approx(argmin, abs=1e-6)
    assert v == pytest.approx(value, abs=1e-12)
    grid = np.linspace(*bracket, 1_000_001)
    assert v <= f(grid).min() + 1e-12


def test_golden_prefers_endpoints_and_rejects_nan():
    assert minimize_convex_1d(lambda a: a, (0, 1))[1] == 0.0
    with pytest.raises(ValueError):
        minimize_convex_1d(lambda a: math.nan, (0, 1))


def test_golden_batch_rowwise():
    centers = np.array([-0.5, 0.0, 0.3, 2.0])
    x, v = golden_batch(lambda a: (a - centers) ** 2, -np.ones(4), np.ones(4))
    assert np.allclose(x, np.clip(centers, -1, 1), atol=1e-6)
    assert np.allclose(v, [0, 0, 0, 1], atol=1e-12)


@pytest.mark.parametrize("g, bracket, root", [
    (lambda t: t - 2, (0, 5), 2.0),
    (lambda t: t + 0.2, (-1, 1), -0.2),
    (lambda t: t * t - 2, (0, 2), math.sqrt(2)),
])
def test_bisection_examples(g, bracket, root):
    assert bisect_root(g, bracket) == pytest.approx(root, abs=1e-11)


def test_bisection_needs_sign_change():
    with pytest.raises(ValueError):
        bisect_root(lambda t: t * t + 1, (-1, 1))


def _quad_oracle(q):
    # h(q) = -(q1 - 1/2)^2 on the 2-simplex
    return -(q[0] - 0.5) ** 2, np.array([-2 * (q[0] - 0.5), 0.0])


def test_kelley_examples():
    assert maximize_concave_simplex(_quad_oracle, 2).value == pytest.approx(0.0, abs=1e-9)
    lin = lambda q: (q @ [5 / 16, 0.1, 0.0], np.array([5 / 16, 0.1, 0.0]))
    assert maximize_concave_simplex(lin, 3).value == pytest.approx(5 / 16, abs=1e-12)
    tent = lambda q: (min(q[0], q[1]) / 2, np.array([0.5, 0]) if q[0] <= q[1] else np.array([0, 0.5]))
    assert maximize_concave_simplex(tent, 2).value == pytest.approx(0.25, abs=1e-9)


def test_kelley_empty_domain():
    res = maximize_concave_simplex(_quad_oracle, 2, A_ub=np.array([[1.0, 1.0]]))
    assert res.status == "infeasible"


@given(st.integers(0, 10_000))
def test_kelley_matches_lp_on_piecewise_linear(seed):
    rng = np.random.default_rng(seed)
    n, k = rng.integers(2, 5), rng.integers(1, 5)
    G = rng.uniform(-1, 1, (k, n))
    c = rng.uniform(-1, 1, k)

    def oracle(q):
        v = G @ q + c
        i = int(np.argmin(v))
        return float(v[i]), G[i]

    # max t s.t. t <= G q + c, q in simplex
    lp = LinearProgram(np.r_[np.zeros(n), 1.0], np.hstack([-G, np.ones((k, 1))]), c,
                       A_eq=np.r_[np.ones(n), 0.0][None, :], b_eq=[1.0],
                       bounds=[(0, None)] * n + [(None, None)], maximize=True)
    assert maximize_concave_simplex(oracle, n).value == pytest.approx(solve_lp(lp).value, abs=1e-8)
