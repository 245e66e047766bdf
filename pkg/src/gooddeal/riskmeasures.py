"""Valuation functionals on claims and their penalty functions.

A ``RiskMeasure`` wraps a vectorized evaluator over a batch of claims (rows)
plus, when known in closed form, its exact penalty q -> rho*(q). Measures
built from a market (superhedging dual, acceptance sets, indifference prices)
minimize over the market's parametrization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .markets import MarketModel
from .reports import DiagnosticReport, verdict_of
from .solvers import LinearProgram, golden_batch, solve_lp
from .spaces import SampleSpace, YoungFunction, as_density

AXIOM_TOL = 1e-9


class ImproperValuation(ValueError):
    """An inner infimum is -inf, so the valuation is not a proper functional."""


class EmptyZeroSet(ValueError):
    """No density has zero support value, so the conical restriction does not exist."""


@dataclass(frozen=True, eq=False)
class RiskMeasure:
    """rho evaluated row-wise on a (B, n) batch; ``penalty`` is exact when given."""

    name: str
    n: int
    batch: Callable[[np.ndarray], np.ndarray]
    penalty_fn: Optional[Callable[[np.ndarray], float]] = None
    descriptor: dict = field(default_factory=dict)

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        if X.ndim == 1:
            if X.size != self.n:
                raise ValueError(f"claim has {X.size} entries, expected {self.n}")
            return float(self.batch(X[None, :])[0])
        return self.batch(X)

    evaluate = __call__

    @property
    def has_exact_penalty(self) -> bool:
        return self.penalty_fn is not None

    def penalty(self, q) -> float:
        if self.penalty_fn is None:
            raise ValueError(f"{self.name} has no exact penalty; use penalty_of for an estimate")
        return float(self.penalty_fn(np.asarray(q, dtype=float)))

    def shifted(self, offset: float, name: Optional[str] = None) -> "RiskMeasure":
        """rho - offset, with the penalty moved by +offset."""
        pen = None
        if self.penalty_fn is not None:
            base = self.penalty_fn
            pen = lambda q: base(q) + offset
        batch = self.batch
        return RiskMeasure(name or f"{self.name}-shifted", self.n, lambda X: batch(X) - offset, pen,
                           dict(self.descriptor))

    def normalized(self) -> "RiskMeasure":
        return self.shifted(self(np.zeros(self.n)), f"{self.name}-normalized")


# --- measures attached to a market -------------------------------------------

def superhedge_measure(market: MarketModel) -> RiskMeasure:
    return RiskMeasure("superhedge", market.n, market.superhedge_batch, None, {"kind": "superhedge"})


def rho_hat0_measure(market: MarketModel) -> RiskMeasure:
    """The largest lower semicontinuous convex minorant of superhedging cost."""
    return RiskMeasure("rho_hat0", market.n, market.rho_hat0_batch,
                       lambda q: market.support_function(q), {"kind": "rho_hat0"})


def superhedging_rho0(market: MarketModel, x) -> float:
    return market.superhedge(x)


def rho_hat0(market: MarketModel, x) -> float:
    return market.rho_hat0(x)


def penalty_rho0(market: MarketModel, q) -> float:
    return float(market.support_function(as_density(market.space, q)))


# --- closed-form measures -------------------------------------------------------

def entropic(space: SampleSpace, gamma: float = 1.0) -> RiskMeasure:
    """(1/gamma) log E[exp(-gamma x)], computed with a max shift."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    p = space.probs

    def batch(X):
        Y = -gamma * np.atleast_2d(X)
        top = Y.max(axis=1, keepdims=True)
        return (top[:, 0] + np.log(np.exp(Y - top) @ p)) / gamma

    return RiskMeasure(f"entropic(gamma={gamma:g})", space.n, batch, None,
                       {"kind": "entropic", "gamma": gamma})


def worst_case(space: SampleSpace, q) -> RiskMeasure:
    """x -> E_q[-x]: penalty 0 at q and +inf elsewhere."""
    q = as_density(space, q).copy()

    def pen(r):
        return 0.0 if np.max(np.abs(np.asarray(r) - q)) <= 1e-9 else math.inf

    return RiskMeasure("worst_case", space.n, lambda X: -np.atleast_2d(X) @ q, pen,
                       {"kind": "worst_case", "q": q.tolist()})


def _envelope(densities, costs):
    Q, c = densities, costs

    def pen(q):
        q = np.asarray(q, dtype=float)
        res = solve_lp(LinearProgram(c, A_eq=np.vstack([Q.T, np.ones(len(c))]),
                                     b_eq=np.concatenate([q, [1.0]])))
        return res.value if res.ok else math.inf

    return pen


def penalty_table(space: SampleSpace, densities, penalties, name: str = "penalty_table") -> RiskMeasure:
    """max_r {E_{q_r}[-x] - c_r}; the exact penalty is the convex envelope of the table."""
    Q = np.atleast_2d(np.asarray(densities, dtype=float))
    c = np.asarray(penalties, dtype=float).ravel()
    if Q.shape != (c.size, space.n):
        raise ValueError("one penalty per density expected")
    for row in Q:
        as_density(space, row, tol=1e-9)
    if not np.all(np.isfinite(c)):
        raise ValueError("table penalties must be finite")

    def batch(X):
        return np.max(-np.atleast_2d(X) @ Q.T - c[None, :], axis=1)

    return RiskMeasure(name, space.n, batch, _envelope(Q, c),
                       {"kind": "penalty_table", "densities": Q.tolist(), "penalties": c.tolist()})


# --- minimization over a market ---------------------------------------------------

def _scipy_min(fun, lo, hi, simplex, restarts, seed):
    from scipy.optimize import minimize

    d = lo.size
    rng = np.random.default_rng(seed)
    starts = [np.clip(0.5 * (lo + hi), lo, hi) if not simplex else np.full(d, 1.0 / (d + 1))]
    for _ in range(restarts - 1):
        if simplex:
            starts.append(rng.dirichlet(np.ones(d + 1))[1:])
        else:
            starts.append(lo + (hi - lo) * rng.random(d))
    cons = [{"type": "ineq", "fun": lambda p: 1.0 - p.sum(), "jac": lambda p: -np.ones(d)}] if simplex else []
    best_p, best_v = starts[0], fun(starts[0])
    for s in starts:
        res = minimize(fun, s, method="SLSQP", bounds=list(zip(lo, hi)), constraints=cons,
                       options={"ftol": 1e-13, "maxiter": 500})
        p = np.clip(res.x, lo, hi)
        if simplex and p.sum() > 1:
            p = p / p.sum()
        v = fun(p)
        if v < best_v:
            best_p, best_v = p, v
    return best_p, best_v


def _min_bounded(market, objective, idx, lo, hi, restarts, seed):
    d = market.param_dim
    B = idx.size
    if d == 0:
        return np.zeros((B, 0)), objective(market.claims_at(np.zeros((B, 0))), idx)
    if d == 1:
        f = lambda a: objective(market.claims_at(a[:, None]), idx)
        a, v = golden_batch(f, np.full(B, lo[0]), np.full(B, hi[0]), tol=1e-12)
        return a[:, None], v
    P = np.empty((B, d))
    V = np.empty(B)
    for b in range(B):
        one = np.array([idx[b]])
        fun = lambda p: float(objective(market.claims_at(p[None, :]), one)[0])
        P[b], V[b] = _scipy_min(fun, lo, hi, market.param_simplex, restarts, seed)
    return P, V


def minimize_over_market(market: MarketModel, objective, count: int, restarts: int = 8, seed: int = 0):
    """Solve ``count`` problems min_{m in M} objective(m, b).

    ``objective(claims, idx)`` evaluates row i of ``claims`` for problem idx[i].
    Unbounded parameter ranges are searched on growing boxes; a minimizer that
    keeps running away while the value keeps dropping signals -inf.
    """
    lo, hi = market.param_bounds()
    idx = np.arange(count)
    if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
        return _min_bounded(market, objective, idx, lo, hi, restarts, seed)[1]
    out = np.full(count, np.nan)
    prev = np.full(count, np.inf)
    active = idx
    radius = 4.0
    while active.size:
        blo, bhi = np.maximum(lo, -radius), np.minimum(hi, radius)
        P, V = _min_bounded(market, objective, active, blo, bhi, restarts, seed)
        edge = ((np.abs(P - blo) < 1e-6 * radius) & ~np.isfinite(lo)) | \
               ((np.abs(P - bhi) < 1e-6 * radius) & ~np.isfinite(hi))
        at_edge = np.any(edge, axis=1)
        out[active] = V
        if radius >= 2.0 ** 40:
            if np.any(at_edge & (prev[active] - V > 1.0)):
                raise ImproperValuation("inner infimum appears to be -inf")
            break
        prev[active] = V
        active = active[at_edge]
        radius *= 4.0
    return out


# --- acceptance sets, shortfall, indifference ----------------------------------------

@dataclass(frozen=True, eq=False)
class AcceptanceSet:
    """{z : level(z) <= 0} for a convex level function nonincreasing in z.

    ``level`` maps a (B, n) batch to (B,). The set must contain L_+.
    """

    level: Callable[[np.ndarray], np.ndarray]
    name: str = "acceptance"
    requirement: Optional[Callable[[np.ndarray], np.ndarray]] = None


def _capital_requirement(A: AcceptanceSet, Z, tol: float = 1e-15):
    """inf{r : r + z in A} row-wise, by batched bracketing and bisection."""
    if A.requirement is not None:
        return A.requirement(np.atleast_2d(Z))
    Z = np.atleast_2d(Z)
    B = Z.shape[0]
    hi = -Z.min(axis=1)
    ok = A.level(hi[:, None] + Z) <= 0
    step = np.maximum(1.0, np.abs(hi))
    for _ in range(64):
        if ok.all():
            break
        hi = np.where(ok, hi, hi + step)
        step *= 2
        ok = A.level(hi[:, None] + Z) <= 0
    if not ok.all():
        return np.full(B, math.inf)
    width = np.ones(B)
    lo = hi - width
    bad = A.level(lo[:, None] + Z) > 0
    for _ in range(80):
        if bad.all():
            break
        hi = np.where(bad, hi, lo)
        width = np.where(bad, width, 2 * width)
        lo = np.where(bad, lo, hi - width)
        bad = A.level(lo[:, None] + Z) > 0
    unbounded = ~bad
    for _ in range(200):
        gap = hi - lo
        if np.all(gap <= tol * np.maximum(1.0, np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        acc = A.level(mid[:, None] + Z) <= 0
        hi = np.where(acc, mid, hi)
        lo = np.where(acc, lo, mid)
    return np.where(unbounded, -math.inf, hi)


def acceptance_set_measure(A: AcceptanceSet, market: MarketModel, name: Optional[str] = None) -> RiskMeasure:
    """x -> inf{r : r + m + x in A for some m in M}."""

    def batch(X):
        X = np.atleast_2d(X)
        return minimize_over_market(market, lambda C, idx: _capital_requirement(A, C + X[idx]), X.shape[0])

    return RiskMeasure(name or f"acceptance[{A.name}]", market.n, batch, None,
                       {"kind": "acceptance", "set": A.name})


def shortfall_set(space: SampleSpace, phi: YoungFunction, delta: float) -> AcceptanceSet:
    """{z : E[phi(min(z, 0))] <= delta}."""
    if not delta > 0:
        raise ValueError("shortfall level delta must be positive")
    p = space.probs

    def level(Z):
        return phi(np.minimum(np.atleast_2d(Z), 0.0)) @ p - delta

    def requirement(Z):
        # g(r) = E[phi((r + z)^-)] is convex and decreasing; Newton from the left
        # of the root stays on that side and converges monotonically.
        r = -Z.min(axis=1) - phi.inverse(delta / p.min()) * (1 + 1e-9) - 1e-12
        for _ in range(200):
            short = np.maximum(-(r[:, None] + Z), 0.0)
            g = phi(short) @ p - delta
            dg = -(phi.derivative(short) * (short > 0)) @ p
            step = np.where(dg < 0, -g / dg, 0.0)
            r = r + np.maximum(step, 0.0)
            if np.all(step <= 1e-15 * np.maximum(1.0, np.abs(r))):
                break
        return r

    return AcceptanceSet(level, f"shortfall(delta={delta:g})", requirement if phi.smooth else None)


def shortfall_measure(space: SampleSpace, market: MarketModel, phi: YoungFunction, delta: float,
                      normalized: bool = False) -> RiskMeasure:
    rho = acceptance_set_measure(shortfall_set(space, phi, delta), market, "shortfall")
    rho = RiskMeasure("shortfall", rho.n, rho.batch, None,
                      {"kind": "shortfall", "loss": phi.to_dict(), "delta": delta})
    return rho.normalized() if normalized else rho


def shortfall(space: SampleSpace, market: MarketModel, phi: YoungFunction, delta: float, x) -> float:
    """Least price at which selling x keeps the expected shortfall below delta."""
    return shortfall_measure(space, market, phi, delta)(-np.asarray(x, dtype=float))


def hedged_infimum(eta: RiskMeasure, market: MarketModel, X) -> np.ndarray:
    """inf_{m in M} eta(m + x) row-wise."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return minimize_over_market(market, lambda C, idx: eta.batch(C + X[idx]), X.shape[0])


def indifference_measure(eta: RiskMeasure, market: MarketModel) -> RiskMeasure:
    """x -> inf_m eta(m + x) - inf_m eta(m)."""
    base = float(hedged_infimum(eta, market, np.zeros((1, market.n)))[0])
    if not math.isfinite(base):
        raise ImproperValuation("inf over the market of eta is not finite")

    def batch(X):
        return hedged_infimum(eta, market, X) - base

    return RiskMeasure(f"indifference[{eta.name}]", market.n, batch, None,
                       {"kind": "indifference", "eta": eta.descriptor, "inner_inf_at_zero": base})


def indifference_price(eta: RiskMeasure, market: MarketModel, x) -> float:
    return indifference_measure(eta, market)(x)


# --- conical restriction ---------------------------------------------------------------

def zero_set_vertices(market: MarketModel, max_combos: int = 5000) -> np.ndarray:
    """Vertices of {q in simplex : normals @ q <= 0}; empty array when the set is empty."""
    n = market.n
    D = np.asarray(market.zero_set_normals(), dtype=float).reshape(-1, n)
    rows = np.vstack([D, -np.eye(n)])
    verts = []
    if math.comb(rows.shape[0], n - 1) <= max_combos:
        for combo in itertools.combinations(range(rows.shape[0]), n - 1):
            A = np.vstack([rows[list(combo)], np.ones(n)])
            try:
                q = np.linalg.solve(A, np.concatenate([np.zeros(n - 1), [1.0]]))
            except np.linalg.LinAlgError:
                continue
            if np.all(rows @ q <= 1e-10):
                verts.append(np.clip(q, 0.0, None))
    else:
        rng = np.random.default_rng(0)
        dirs = np.vstack([np.eye(n), -np.eye(n), rng.standard_normal((8 * n, n))])
        for c in dirs:
            res = solve_lp(LinearProgram(c, A_ub=D if D.size else None, b_ub=np.zeros(D.shape[0]) if D.size else None,
                                         A_eq=np.ones((1, n)), b_eq=[1.0]))
            if not res.ok:
                return np.zeros((0, n))
            verts.append(np.clip(res.x, 0.0, None))
    if not verts:
        return np.zeros((0, n))
    V = np.array(verts)
    V /= V.sum(axis=1, keepdims=True)
    V = np.unique(np.round(V, 12), axis=0)
    return V


def restrict_conical(rho: RiskMeasure, market: MarketModel) -> RiskMeasure:
    """sup over the zero set of the market penalty of E_q[-x] - rho*(q).

    Exact when rho* is affine on that set (for instance rho_hat0, whose penalty
    vanishes there); otherwise a lower approximation on vertices, edge midpoints
    and the centroid.
    """
    if not rho.has_exact_penalty:
        raise ValueError("conical restriction needs an exact penalty")
    V = zero_set_vertices(market)
    if V.shape[0] == 0:
        raise EmptyZeroSet("no density has zero support value")
    cands = [V]
    if V.shape[0] > 1:
        cands.append(np.array([(a + b) / 2 for a, b in itertools.combinations(V, 2)]))
        cands.append(V.mean(axis=0, keepdims=True))
    C = np.vstack(cands)
    pens = np.array([rho.penalty(q) for q in C])
    keep = np.isfinite(pens)
    if not keep.any():
        raise EmptyZeroSet("penalty is infinite on the whole zero set")
    out = penalty_table(market.space, C[keep], pens[keep], name=f"conical[{rho.name}]")
    return RiskMeasure(out.name, out.n, out.batch, out.penalty_fn,
                       {"kind": "conical", "of": rho.descriptor})


# --- penalties and axioms ----------------------------------------------------------------

def penalty_of(rho: RiskMeasure, q, probe_radius: float = 1.0, probe_count: int = 1000,
               seed: int = 0, market: Optional[MarketModel] = None):
    """Exact penalty when known, else a lower estimate sup over probes of E_q[-x] - rho(x).

    Returns (value, exact_flag).
    """
    q = np.asarray(q, dtype=float)
    if rho.has_exact_penalty:
        return rho.penalty(q), True
    n = rho.n
    rng = np.random.default_rng(seed)
    probes = [np.zeros((1, n)), probe_radius * np.eye(n), -probe_radius * np.eye(n),
              probe_radius * np.ones((1, n)), -probe_radius * np.ones((1, n)),
              rng.uniform(-probe_radius, probe_radius, size=(probe_count, n))]
    if market is not None:
        pts = market.sample_points(rng, 8)
        top = np.max(np.abs(pts), axis=1, keepdims=True)
        pts = probe_radius * pts / np.where(top > 0, top, 1.0)
        probes += [pts, -pts]
    X = np.vstack(probes)
    return float(np.max(-X @ q - rho.batch(X))), False


def axioms_check(rho: RiskMeasure, sample_count: int = 10_000, seed: int = 42,
                 scale: float = 2.0, tol: float = AXIOM_TOL) -> DiagnosticReport:
    """Randomized monotonicity, cash invariance, convexity and positive homogeneity."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    n = rho.n
    rng = np.random.default_rng(seed)
    X = rng.uniform(-scale, scale, size=(sample_count, n))
    Y = rng.uniform(-scale, scale, size=(sample_count, n))
    up = X + rng.exponential(scale / 4, size=(sample_count, n)) * (rng.random((sample_count, n)) < 0.7)
    r = rng.uniform(-scale, scale, size=sample_count)
    lam = rng.random(sample_count)
    c = np.exp(rng.uniform(np.log(0.1), np.log(3.0), size=sample_count))

    rx = rho.batch(X)
    ry = rho.batch(Y)
    rup = rho.batch(up)
    rcash = rho.batch(X + r[:, None])
    rmix = rho.batch(lam[:, None] * X + (1 - lam[:, None]) * Y)
    rscaled = rho.batch(c[:, None] * X)
    r0 = rho(np.zeros(n))

    with np.errstate(invalid="ignore"):
        mono = np.nan_to_num(rup - rx, nan=np.inf)
        cash = np.nan_to_num(np.abs(rcash - rx + r), nan=np.inf)
        conv = np.nan_to_num(rmix - lam * rx - (1 - lam) * ry, nan=np.inf)
        homo = np.nan_to_num(np.abs(rscaled - c * rx), nan=np.inf)

    def worst(v):
        i = int(np.argmax(v))
        return max(0.0, float(v[i])), i

    margins, witnesses = {}, {}
    for key, v, wit in (
        ("monotonicity", mono, lambda i: {"x": X[i], "y": up[i]}),
        ("cash_invariance", cash, lambda i: {"x": X[i], "r": r[i]}),
        ("convexity", conv, lambda i: {"x": X[i], "y": Y[i], "lambda": lam[i]}),
        ("homogeneity", homo, lambda i: {"x": X[i], "lambda": c[i]}),
    ):
        w, i = worst(v)
        margins[key] = w
        witnesses[key] = wit(i)
    margins["value_at_zero"] = r0
    convex_ok = all(margins[k] <= tol for k in ("monotonicity", "cash_invariance", "convexity"))
    coherent = margins["homogeneity"] <= tol and abs(r0) <= tol
    notes = [f"samples={sample_count} seed={seed} tol={tol:g}",
             "positively homogeneous" if coherent else "not positively homogeneous"]
    rep = DiagnosticReport("axioms", verdict_of(convex_ok), margins, witnesses, notes)
    rep.witnesses["coherent"] = coherent
    return rep
