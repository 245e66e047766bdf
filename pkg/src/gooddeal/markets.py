"""Convex sets of zero-cost attainable claims.

Every market is a closed convex set M with 0 in M and M - L_+ = M. Three bodies
are supported:

* ``Polytope``: conv{0, m_1, ..., m_J} - L_+
* ``ScaledBox``: {sum_i theta_i S_i : theta in a box} - L_+
* ``IlliquidCurve``: {alpha S - f(alpha)} - L_+ for a superlinear friction f

Polytope and ScaledBox share a polyhedral representation

    M = sum_g conv(G_g) + cone(D) - L_+,

so superhedging, its dual and membership are all small LPs. The conical hull
of any market is again polyhedral (no groups, cone directions only).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .solvers import LinearProgram, golden_batch, solve_lp
from .spaces import SampleSpace, as_claim

MEMBER_TOL = 1e-9


def _as_batch(x, n):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != n:
        raise ValueError(f"claims have {X.shape[1]} entries, expected {n}")
    return X, single


class MarketModel:
    """Interface shared by all market bodies."""

    space: SampleSpace

    @property
    def n(self) -> int:
        return self.space.n

    # --- parametrization ------------------------------------------------
    @property
    def param_dim(self) -> int:
        raise NotImplementedError

    def param_bounds(self):
        """(lo, hi) arrays for the parameters, possibly infinite."""
        raise NotImplementedError

    @property
    def param_simplex(self) -> bool:
        """True when the parameters must also satisfy sum <= 1."""
        return False

    def claims_at(self, P) -> np.ndarray:
        raise NotImplementedError

    def recession(self) -> np.ndarray:
        return np.zeros((0, self.n))

    def sample_points(self, rng: np.random.Generator, count: int, radius: float = 10.0) -> np.ndarray:
        """Claims in M: extreme parameters plus random parameters."""
        lo, hi = self.param_bounds()
        lo = np.maximum(lo, -radius)
        hi = np.minimum(hi, radius)
        d = self.param_dim
        pts = [np.zeros(d)]
        if d:
            if self.param_simplex:
                pts += list(np.eye(d))
                rand = rng.dirichlet(np.ones(d + 1), size=count)[:, 1:]
            else:
                if d <= 10:
                    pts += [np.array(c) for c in itertools.product(*zip(lo, hi))]
                rand = lo + (hi - lo) * rng.random((count, d))
            pts = np.vstack([np.array(pts), rand])
        else:
            pts = np.zeros((1, 0))
        return self.claims_at(pts)

    # --- valuation --------------------------------------------------------
    def support_function(self, q):
        raise NotImplementedError

    def superhedge(self, x):
        """rho^0(x) = inf{r : r + m + x >= 0 for some m in M}; -inf when unbounded."""
        X, single = _as_batch(x, self.n)
        out = self.superhedge_batch(X)
        return float(out[0]) if single else out

    def rho_hat0(self, x):
        """sup over densities of E_q[-x] - support(q); -inf when no density has finite support."""
        X, single = _as_batch(x, self.n)
        out = self.rho_hat0_batch(X)
        return float(out[0]) if single else out

    def superhedge_batch(self, X) -> np.ndarray:
        raise NotImplementedError

    def rho_hat0_batch(self, X) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = MEMBER_TOL) -> bool:
        raise NotImplementedError

    def min_support(self):
        """(min over the simplex of the support function, a minimizing density)."""
        raise NotImplementedError

    def zero_set_normals(self) -> np.ndarray:
        """Rows d with {q in simplex : support(q) = 0} = {q in simplex : d @ q <= 0}."""
        raise NotImplementedError

    @property
    def is_polyhedral(self) -> bool:
        return False

    def to_dict(self) -> dict:
        raise NotImplementedError


class PolyhedralMarket(MarketModel):
    """sum_g conv(G_g) + cone(D) - L_+ with each conv(G_g) containing 0."""

    @property
    def is_polyhedral(self) -> bool:
        return True

    def groups(self) -> list:
        raise NotImplementedError

    def support_function(self, q):
        Q = np.asarray(q, dtype=float)
        single = Q.ndim == 1
        Q = np.atleast_2d(Q)
        total = np.zeros(Q.shape[0])
        for G in self.groups():
            total += np.max(Q @ G.T, axis=1)
        D = self.recession()
        if D.size:
            bad = np.max(Q @ D.T, axis=1) > 1e-12
            total = np.where(bad, np.inf, total)
        return float(total[0]) if single else total

    def _hedge_blocks(self):
        cols = [G.T for G in self.groups()]
        D = self.recession()
        sizes = [c.shape[1] for c in cols]
        span = np.hstack(cols + [D.T]) if (cols or D.size) else np.zeros((self.n, 0))
        return span, sizes, D.shape[0]

    def superhedge_batch(self, X):
        n = self.n
        span, sizes, nd = self._hedge_blocks()
        k = span.shape[1]
        # variables (r, weights): -r - span @ w <= x
        A_ub = np.hstack([-np.ones((n, 1)), -span])
        A_eq, b_eq = None, None
        if sizes:
            A_eq = np.zeros((len(sizes), 1 + k))
            start = 1
            for g, s in enumerate(sizes):
                A_eq[g, start:start + s] = 1.0
                start += s
            b_eq = np.ones(len(sizes))
        c = np.zeros(1 + k)
        c[0] = 1.0
        bounds = [(None, None)] + [(0, None)] * k
        out = np.empty(X.shape[0])
        for b, x in enumerate(X):
            res = solve_lp(LinearProgram(c, A_ub, x, A_eq, b_eq, bounds))
            out[b] = res.value if res.ok else (-math.inf if res.status == "unbounded" else math.nan)
        return out

    def _dual_lp(self, x, extra_obj=None):
        n = self.n
        groups = self.groups()
        D = self.recession()
        ng = len(groups)
        rows, rhs = [], []
        for g, G in enumerate(groups):
            for row in G:
                r = np.zeros(n + ng)
                r[:n] = row
                r[n + g] = -1.0
                rows.append(r)
                rhs.append(0.0)
        for d in D:
            r = np.zeros(n + ng)
            r[:n] = d
            rows.append(r)
            rhs.append(0.0)
        c = np.concatenate([-np.asarray(x, dtype=float), -np.ones(ng)])
        A_eq = np.concatenate([np.ones(n), np.zeros(ng)])[None, :]
        lp = LinearProgram(
            c,
            np.array(rows) if rows else None,
            np.array(rhs) if rows else None,
            A_eq, [1.0],
            [(0, None)] * n + [(None, None)] * ng,
            maximize=True,
        )
        return solve_lp(lp)

    def rho_hat0_batch(self, X):
        out = np.empty(X.shape[0])
        for b, x in enumerate(X):
            res = self._dual_lp(x)
            out[b] = res.value if res.ok else -math.inf
        return out

    def rho_hat0_argmax(self, x):
        """(value, maximizing density) of the dual problem, or (-inf, None)."""
        res = self._dual_lp(as_claim(self.space, x))
        if not res.ok:
            return -math.inf, None
        return res.value, np.clip(res.x[: self.n], 0.0, None)

    def contains(self, x, tol: float = MEMBER_TOL) -> bool:
        x = as_claim(self.space, x)
        span, sizes, _ = self._hedge_blocks()
        k = span.shape[1]
        if k == 0:
            return bool(np.all(x <= tol))
        A_eq, b_eq = None, None
        if sizes:
            A_eq = np.zeros((len(sizes), k))
            start = 0
            for g, s in enumerate(sizes):
                A_eq[g, start:start + s] = 1.0
                start += s
            b_eq = np.ones(len(sizes))
        res = solve_lp(LinearProgram(np.zeros(k), -span, -(x - tol), A_eq, b_eq))
        return res.ok

    def min_support(self):
        res = self._dual_lp(np.zeros(self.n))
        if not res.ok:
            return math.inf, None
        return -res.value, np.clip(res.x[: self.n], 0.0, None)

    def zero_set_normals(self) -> np.ndarray:
        rows = [G[np.any(np.abs(G) > 0, axis=1)] for G in self.groups()]
        rows.append(self.recession())
        return np.vstack(rows) if rows else np.zeros((0, self.n))


@dataclass(frozen=True, eq=False)
class Polytope(PolyhedralMarket):
    """conv{0, m_1..m_J} - L_+; the zero generator is always adjoined."""

    space: SampleSpace
    generators: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.size == 0:
            G = np.zeros((0, self.space.n))
        G = np.atleast_2d(G)
        if G.shape[1] != self.space.n or not np.all(np.isfinite(G)):
            raise ValueError("generators must be finite claims on the sample space")
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @cached_property
    def _groups(self):
        return [np.vstack([np.zeros((1, self.n)), self.generators])]

    def groups(self):
        return self._groups

    @property
    def param_dim(self):
        return self.generators.shape[0]

    @property
    def param_simplex(self):
        return True

    def param_bounds(self):
        d = self.param_dim
        return np.zeros(d), np.ones(d)

    def claims_at(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if self.param_dim == 0:
            return np.zeros((P.shape[0], self.n))
        return P @ self.generators

    def to_dict(self):
        return {"type": "polytope", "generators": self.generators.tolist()}


@dataclass(frozen=True, eq=False)
class ScaledBox(PolyhedralMarket):
    """{theta @ S : theta in prod [a_i, b_i]} - L_+ with a_i <= 0 <= b_i."""

    space: SampleSpace
    S: np.ndarray
    box: np.ndarray

    def __post_init__(self):
        S = np.atleast_2d(np.asarray(self.S, dtype=float))
        box = np.atleast_2d(np.asarray(self.box, dtype=float))
        if S.shape[1] != self.space.n or not np.all(np.isfinite(S)):
            raise ValueError("underlying claims must be finite claims on the sample space")
        if box.shape != (S.shape[0], 2):
            raise ValueError("box needs one [a, b] pair per underlying")
        if np.any(box[:, 0] > 0) or np.any(box[:, 1] < 0) or np.any(np.isnan(box)):
            raise ValueError("box must contain 0")
        S.setflags(write=False)
        box.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "box", box)

    @cached_property
    def _groups(self):
        out = []
        for (a, b), s in zip(self.box, self.S):
            lo = a * s if math.isfinite(a) else np.zeros(self.n)
            hi = b * s if math.isfinite(b) else np.zeros(self.n)
            out.append(np.vstack([lo, hi]))
        return out

    @cached_property
    def _recession(self):
        rows = []
        for (a, b), s in zip(self.box, self.S):
            if not math.isfinite(b):
                rows.append(s)
            if not math.isfinite(a):
                rows.append(-s)
        return np.array(rows) if rows else np.zeros((0, self.n))

    def groups(self):
        return self._groups

    def recession(self):
        return self._recession

    @property
    def param_dim(self):
        return self.S.shape[0]

    def param_bounds(self):
        return self.box[:, 0].copy(), self.box[:, 1].copy()

    def claims_at(self, P):
        return np.atleast_2d(np.asarray(P, dtype=float)) @ self.S

    def to_dict(self):
        box = [[None if not math.isfinite(v) else float(v) for v in row] for row in self.box]
        return {"type": "scaled_box", "S": self.S.tolist(), "box": box}


@dataclass(frozen=True)
class Friction:
    """Even superlinear cost: "quadratic" scale*a^2 or "exp" scale*(e^|a| - 1)."""

    kind: str = "quadratic"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("quadratic", "exp"):
            raise ValueError(f"unknown friction kind {self.kind!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("friction scale must be positive and finite")

    def __call__(self, a):
        a = np.asarray(a, dtype=float)
        if self.kind == "quadratic":
            return self.scale * a * a
        return self.scale * np.expm1(np.abs(a))

    @property
    def slope_at_zero(self) -> float:
        return 0.0 if self.kind == "quadratic" else self.scale

    def best_position(self, s):
        """argmax_a {a s - f(a)} without position limits."""
        s = np.asarray(s, dtype=float)
        if self.kind == "quadratic":
            return s / (2.0 * self.scale)
        mag = np.abs(s) / self.scale
        return np.where(mag > 1.0, np.sign(s) * np.log(np.maximum(mag, 1.0)), 0.0)

    def slope(self, a):
        """f'(a), with 0 at a = 0 (any value in the subdifferential works for callers)."""
        a = np.asarray(a, dtype=float)
        if self.kind == "quadratic":
            return 2.0 * self.scale * a
        with np.errstate(over="ignore"):
            return np.where(a == 0, 0.0, np.sign(a) * self.scale * np.exp(np.abs(a)))

    def to_dict(self):
        key = "c" if self.kind == "quadratic" else "beta"
        return {"kind": self.kind, key: self.scale}


@dataclass(frozen=True, eq=False)
class IlliquidCurve(MarketModel):
    """{alpha S - f(alpha) : alpha in [lo, hi]} - L_+ for a superlinear friction f.

    Positions beyond the best responses to the extreme prices are dominated, so
    the body is always cut down to a finite effective interval.
    """

    space: SampleSpace
    S: np.ndarray
    friction: Friction = field(default_factory=Friction)
    alpha: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float).ravel()
        if S.shape != (self.space.n,) or not np.all(np.isfinite(S)):
            raise ValueError("S must be a finite claim on the sample space")
        lo, hi = (float(v) for v in self.alpha)
        if lo > 0 or hi < 0:
            raise ValueError("position bounds must contain 0")
        S.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "alpha", (lo, hi))

    @cached_property
    def interval(self):
        lo, hi = self.alpha
        f = self.friction
        a_min = float(f.best_position(self.S.min()))
        a_max = float(f.best_position(self.S.max()))
        return max(lo, min(0.0, a_min)), min(hi, max(0.0, a_max))

    @property
    def param_dim(self):
        return 1

    def param_bounds(self):
        lo, hi = self.interval
        return np.array([lo]), np.array([hi])

    def claims_at(self, P):
        a = np.asarray(P, dtype=float).reshape(-1, 1)
        return a * self.S[None, :] - self.friction(a)

    def sample_points(self, rng, count, radius=10.0):
        lo, hi = self.interval
        a = np.concatenate([[lo, 0.0, hi], lo + (hi - lo) * rng.random(count)])
        return self.claims_at(a)

    def conjugate(self, s):
        """sup_{alpha in interval} {alpha s - f(alpha)}."""
        lo, hi = self.interval
        a = np.clip(self.friction.best_position(s), lo, hi)
        return a * np.asarray(s, dtype=float) - self.friction(a)

    def support_function(self, q):
        Q = np.asarray(q, dtype=float)
        return self.conjugate(Q @ self.S) if Q.ndim > 1 else float(self.conjugate(Q @ self.S))

    def superhedge_batch(self, X):
        lo, hi = self.interval
        X = np.atleast_2d(X)
        B = X.shape[0]
        if hi - lo <= 0:
            return np.max(-X, axis=1)

        def obj(a):
            return np.max(self.friction(a)[:, None] - a[:, None] * self.S[None, :] - X, axis=1)

        _, val = golden_batch(obj, np.full(B, lo), np.full(B, hi), tol=1e-13)
        return val

    def rho_hat0_batch(self, X):
        """Exact dual value: an optimal density charges at most two atoms."""
        X = np.atleast_2d(X)
        S = self.S
        lo, hi = self.interval
        best = np.max(-X - self.conjugate(S)[None, :], axis=1)
        order = np.argsort(S, kind="stable")
        for jj, kk in itertools.combinations(range(self.n), 2):
            j, k = order[jj], order[kk]
            if S[k] - S[j] <= 0:
                continue
            a = (X[:, j] - X[:, k]) / (S[k] - S[j])
            s = np.clip(self.friction.slope(a), S[j], S[k])
            s = np.where(a >= hi, S[k], np.where(a <= lo, S[j], s))
            val = -X[:, j] + a * (s - S[j]) - self.conjugate(s)
            best = np.maximum(best, val)
        return best

    def rho_hat0_argmax(self, x):
        """(value, maximizing density), by the same pairwise enumeration."""
        x = as_claim(self.space, x)
        S = self.S
        lo, hi = self.interval
        cands = []
        for k in range(self.n):
            q = self.space.indicator(k)
            cands.append((float(-x[k] - self.conjugate(S[k])), q))
        for j, k in itertools.permutations(range(self.n), 2):
            if S[k] <= S[j]:
                continue
            a = (x[j] - x[k]) / (S[k] - S[j])
            if a >= hi:
                s = S[k]
            elif a <= lo:
                s = S[j]
            else:
                s = float(np.clip(self.friction.slope(a), S[j], S[k]))
            t = (s - S[j]) / (S[k] - S[j])
            q = np.zeros(self.n)
            q[j], q[k] = 1.0 - t, t
            cands.append((float(-x[j] + a * (s - S[j]) - self.conjugate(s)), q))
        return max(cands, key=lambda c: c[0])

    def contains(self, x, tol: float = MEMBER_TOL) -> bool:
        x = as_claim(self.space, x)
        lo, hi = self.interval
        if hi - lo <= 0:
            return bool(np.all(x <= tol))

        def neg_slack(a):
            m = self.claims_at(a)
            return -np.min(m - x[None, :], axis=1)

        _, v = golden_batch(neg_slack, np.array([lo]), np.array([hi]), tol=1e-13)
        return bool(-v[0] >= -tol)

    def min_support(self):
        S = self.S
        s = float(np.clip(0.0, S.min(), S.max()))
        j, k = int(np.argmin(S)), int(np.argmax(S))
        q = np.zeros(self.n)
        if S[k] == S[j]:
            q[:] = 1.0 / self.n
        else:
            t = (s - S[j]) / (S[k] - S[j])
            q[j] += 1.0 - t
            q[k] += t
        return float(self.conjugate(s)), q

    def zero_set_normals(self):
        lo, hi = self.interval
        c = self.friction.slope_at_zero
        rows = []
        if hi > 0:
            rows.append(self.S - c)
        if lo < 0:
            rows.append(-self.S - c)
        return np.array(rows) if rows else np.zeros((0, self.n))

    def to_dict(self):
        alpha = [None if not math.isfinite(v) else v for v in self.alpha]
        return {"type": "illiquid", "S": self.S.tolist(), "friction": self.friction.to_dict(),
                "alpha": alpha}


@dataclass(frozen=True, eq=False)
class ConicalMarket(PolyhedralMarket):
    """Closure of {c m : c >= 0, m in base}, held as cone(normals) - L_+."""

    base: MarketModel

    @property
    def space(self):
        return self.base.space

    def groups(self):
        return []

    @cached_property
    def _recession(self):
        return np.asarray(self.base.zero_set_normals(), dtype=float).reshape(-1, self.n)

    def recession(self):
        return self._recession

    def support_function(self, q, tol: float = 1e-9):
        """0 on the zero set of the base support function, +inf elsewhere."""
        Q = np.asarray(q, dtype=float)
        single = Q.ndim == 1
        Q = np.atleast_2d(Q)
        D = self.recession()
        val = np.zeros(Q.shape[0])
        if D.size:
            val = np.where(np.max(Q @ D.T, axis=1) > tol, np.inf, 0.0)
        return float(val[0]) if single else val

    def zero_set_normals(self):
        return self.recession()

    @property
    def param_dim(self):
        return self.base.param_dim

    def param_bounds(self):
        return self.base.param_bounds()

    def sample_points(self, rng, count, radius=10.0):
        pts = self.base.sample_points(rng, count, radius)
        scale = np.exp(rng.uniform(np.log(0.1), np.log(radius), size=pts.shape[0]))
        return np.vstack([pts, scale[:, None] * pts])

    def to_dict(self):
        return {"type": "conical", "base": self.base.to_dict()}


def conical_hull(market: MarketModel) -> ConicalMarket:
    return ConicalMarket(market)


@dataclass(frozen=True, eq=False)
class ExtendedMarket:
    """{x : rho(-x) <= 0}, held as a membership oracle."""

    rho: "object"

    def contains(self, x, tol: float = 1e-12) -> bool:
        return bool(self.rho(-np.asarray(x, dtype=float)) <= tol)

    def contains_batch(self, X, tol: float = 1e-12) -> np.ndarray:
        return self.rho.batch(-np.atleast_2d(X)) <= tol


def extended_market(rho) -> ExtendedMarket:
    return ExtendedMarket(rho)


def _finite_or_inf(v, sign):
    return sign * math.inf if v is None else float(v)


def market_from_dict(space: SampleSpace, doc: dict) -> MarketModel:
    kind = doc.get("type")
    if kind == "polytope":
        return Polytope(space, np.asarray(doc.get("generators", []), dtype=float))
    if kind == "scaled_box":
        box = [[_finite_or_inf(a, -1), _finite_or_inf(b, 1)] for a, b in doc["box"]]
        return ScaledBox(space, np.asarray(doc["S"], dtype=float), np.asarray(box))
    if kind == "illiquid":
        fr = dict(doc.get("friction", {"kind": "quadratic", "c": 1.0}))
        fkind = fr.get("kind", "quadratic")
        scale = fr.get("c", fr.get("beta", fr.get("scale", 1.0)))
        lo, hi = doc.get("alpha", [None, None])
        return IlliquidCurve(space, np.asarray(doc["S"], dtype=float), Friction(fkind, float(scale)),
                             (_finite_or_inf(lo, -1), _finite_or_inf(hi, 1)))
    if kind == "conical":
        return ConicalMarket(market_from_dict(space, doc["base"]))
    raise ValueError(f"unknown market type {kind!r}")
