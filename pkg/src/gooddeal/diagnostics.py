"""Checkers for valuation-level statements about a market.

Each checker returns a ``DiagnosticReport`` whose verdict is backed by numbers
in ``margins`` and reproducible objects in ``witnesses``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .markets import ConicalMarket, IlliquidCurve, MarketModel, Polytope, ScaledBox, extended_market
from .reports import FAILS, HOLDS, INCONCLUSIVE, DiagnosticReport, verdict_of
from .riskmeasures import RiskMeasure, rho_hat0_measure, worst_case
from .solvers import LinearProgram, maximize_concave_simplex, minimize_convex_1d, solve_lp
from .spaces import SampleSpace

GDV_TOL = 1e-8
ZERO_TOL = 1e-9
POSITIVE_TOL = 1e-12
PENALTY_TOL = 1e-7
DELTA_MIN = 1e-4
CASH_GRID = 2.0 ** np.arange(-10, 5)

FINITE_COLLAPSE_NOTE = (
    "finite sample space: the support function is continuous on the compact simplex, "
    "so the infimum over equivalent densities equals the minimum over all densities; "
    "the strict infinite-space gaps between the weakest conditions close here"
)


def simplex_grid(n: int, rng: Optional[np.random.Generator] = None, count: int = 200) -> np.ndarray:
    """Deterministic density grid: fine lattice for n <= 3, vertices plus random draws above."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        t = np.linspace(0.0, 1.0, 41)
        return np.column_stack([t, 1 - t])
    if n == 3:
        k = 12
        pts = [(i / k, j / k, (k - i - j) / k) for i in range(k + 1) for j in range(k + 1 - i)]
        return np.array(pts)
    rng = rng or np.random.default_rng(0)
    return np.vstack([np.eye(n), np.full((1, n), 1.0 / n), rng.dirichlet(np.ones(n), size=count)])


def _is_rho_hat0_of(rho: Optional[RiskMeasure]) -> bool:
    return rho is None or rho.descriptor.get("kind") == "rho_hat0"


# --- GDV existence and verification ----------------------------------------------

def gdv_exists(market: MarketModel) -> DiagnosticReport:
    """A GDV exists iff the support function has minimum 0 over the simplex."""
    value, q = market.min_support()
    ok = value <= GDV_TOL
    rep = DiagnosticReport("gdv-exists", verdict_of(ok), {"min_penalty": value},
                           {"argmin_density": q} if q is not None else {},
                           [] if q is not None else ["no density has finite support value"])
    if ok:
        rep.measure = rho_hat0_measure(market)
        rep.notes.append("rho_hat0 is returned as a GDV")
    return rep


def is_gdv(rho: RiskMeasure, market: MarketModel, samples: int = 500, seed: int = 42) -> DiagnosticReport:
    """Normalization, rho(-m) <= 0 on M, penalty domination and sublevel inclusion."""
    n = market.n
    rng = np.random.default_rng(seed)
    margins, witnesses, notes = {}, {}, []
    r0 = rho(np.zeros(n))
    margins["value_at_zero"] = r0
    if not (math.isfinite(r0) and abs(r0) <= ZERO_TOL):
        notes.append("not normalized")
        return DiagnosticReport("is-gdv", FAILS, margins, {"claim": np.zeros(n)}, notes)

    # rho(-m) <= 0 on sampled members, recession rays and -L_+ perturbations
    pts = market.sample_points(rng, samples)
    D = market.recession()
    if D.size:
        rays = np.vstack([t * d for d in D for t in (1.0, 10.0, 100.0)])
        k = min(len(rays), len(pts))
        pts = np.vstack([pts, rays, pts[:k] + rays[:k]])
    pts = np.vstack([pts, pts - rng.exponential(0.5, size=pts.shape)])
    vals = rho.batch(-pts)
    i = int(np.argmax(vals))
    margins["max_rho_of_minus_m"] = float(vals[i])
    witnesses["member"] = pts[i]
    cond2 = vals[i] <= ZERO_TOL
    ok = cond2

    if rho.has_exact_penalty:
        Q = simplex_grid(n, rng)
        mq, q_star = market.min_support()
        if q_star is not None:
            Q = np.vstack([Q, q_star])
        if "q" in rho.descriptor:
            Q = np.vstack([Q, rho.descriptor["q"]])
        sig = market.support_function(Q)
        pen = np.array([rho.penalty(q) for q in Q])
        with np.errstate(invalid="ignore"):
            gap = np.where(np.isinf(sig), np.where(np.isinf(pen), 0.0, np.inf), sig - pen)
        j = int(np.argmax(gap))
        margins["max_penalty_shortfall"] = float(gap[j])
        witnesses["density"] = Q[j]
        cond3 = gap[j] <= PENALTY_TOL
        margins["penalty_condition"] = bool(cond3)
        if cond3 != cond2:
            notes.append("member test and penalty test disagree")
        ok = ok and cond3

    X = rng.uniform(-2.0, 2.0, size=(min(samples, 200), n))
    r = market.superhedge(X)
    keep = np.isfinite(r)
    if keep.any():
        bnd = X[keep] + r[keep][:, None]
        v = rho.batch(bnd)
        k = int(np.argmax(v))
        margins["max_rho_on_superhedged"] = float(v[k])
        witnesses["superhedged_claim"] = bnd[k]
        ok = ok and v[k] <= ZERO_TOL
    return DiagnosticReport("is-gdv", verdict_of(ok), margins, witnesses, notes)


# --- relevance, arbitrage, NFL ---------------------------------------------------------

def _scaled_min_support(market, k: int) -> float:
    """min{support(y) : y >= 0, y_k = 1} for a polyhedral market."""
    n = market.n
    groups = market.groups()
    D = market.recession()
    ng = len(groups)
    rows = []
    for g, G in enumerate(groups):
        for row in G:
            r = np.zeros(n + ng)
            r[:n] = row
            r[n + g] = -1.0
            rows.append(r)
    for d in D:
        r = np.zeros(n + ng)
        r[:n] = d
        rows.append(r)
    c = np.concatenate([np.zeros(n), np.ones(ng)])
    e = np.zeros(n + ng)
    e[k] = 1.0
    res = solve_lp(LinearProgram(c, np.array(rows) if rows else None, np.zeros(len(rows)) if rows else None,
                                 e[None, :], [1.0], [(0, None)] * n + [(None, None)] * ng))
    return res.value if res.ok else math.inf


def is_relevant(rho: Optional[RiskMeasure], market: MarketModel, delta: float = DELTA_MIN) -> DiagnosticReport:
    """rho(-z) > 0 for every nonzero z >= 0; rho=None means rho_hat0 of the market."""
    n = market.n
    if _is_rho_hat0_of(rho) and market.is_polyhedral:
        vals = np.array([_scaled_min_support(market, k) for k in range(n)])
        ok = bool(np.all(vals <= ZERO_TOL))
        bad = [k for k in range(n) if vals[k] > ZERO_TOL]
        rep = DiagnosticReport("relevant", verdict_of(ok), {"scaled_min_penalty": vals},
                               {"atoms_failing": bad}, ["exact route: min support over y >= 0 with y_k = 1"])
        return rep
    rho = rho or rho_hat0_measure(market)
    vals = rho.batch(-delta * np.eye(n))
    ok = bool(np.all(vals > POSITIVE_TOL))
    return DiagnosticReport("relevant", verdict_of(ok), {"rho_of_minus_delta_atom": vals},
                            {"delta": delta, "atoms_failing": [k for k in range(n) if vals[k] <= POSITIVE_TOL]},
                            [f"verified on delta >= {delta:g} by monotonicity"])


def first_kind_arbitrage(market: MarketModel, delta: float = DELTA_MIN) -> DiagnosticReport:
    """Holds (no arbitrage of the first kind) iff superhedging delta*e_k costs > 0 for every atom."""
    vals = market.superhedge(-delta * np.eye(market.n))
    flagged = [k for k, v in enumerate(vals) if v <= ZERO_TOL]
    return DiagnosticReport("first-kind", verdict_of(not flagged), {"superhedge_cost": vals},
                            {"delta": delta, "atoms_flagged": flagged})


def _nfl_polyhedral(market):
    n = market.n
    groups = market.groups()
    D = market.recession()
    span = np.hstack([G.T for G in groups] + [D.T]) if (groups or D.size) else np.zeros((n, 0))
    k = span.shape[1]
    A_ub = np.hstack([np.eye(n), -span])
    A_eq, b_eq = None, None
    if groups:
        A_eq = np.zeros((len(groups), n + k))
        start = n
        for g, G in enumerate(groups):
            A_eq[g, start:start + G.shape[0]] = 1.0
            start += G.shape[0]
        b_eq = np.ones(len(groups))
    c = np.concatenate([np.ones(n), np.zeros(k)])
    res = solve_lp(LinearProgram(c, A_ub, np.zeros(n), A_eq, b_eq,
                                 [(0, 1)] * n + [(0, None)] * k, maximize=True))
    return res.value, np.clip(res.x[:n], 0, 1)


def _nfl_illiquid(market: IlliquidCurve, resolution: int = 10_000):
    lo, hi = market.interval

    def slack(a):
        return float(np.min(market.claims_at([a])[0]))

    # {a : min_k m_k(a) >= -tol} is an interval around 0 (concave slack)
    edges = []
    for end in (lo, hi):
        if end == 0 or slack(end) >= -ZERO_TOL:
            edges.append(end)
            continue
        a, b = 0.0, end
        for _ in range(200):
            mid = 0.5 * (a + b)
            if slack(mid) >= -ZERO_TOL:
                a = mid
            else:
                b = mid
        edges.append(a)
    grid = np.linspace(edges[0], edges[1], resolution)
    m = market.claims_at(grid)
    feasible = np.min(m, axis=1) >= -ZERO_TOL
    scores = np.where(feasible, np.clip(m, 0, 1).sum(axis=1), -np.inf)
    i = int(np.argmax(scores))
    return float(scores[i]), np.clip(m[i], 0, 1)


def nfl_check(market: MarketModel) -> DiagnosticReport:
    """No free lunch, by a direct search for z in M with 0 <= z <= 1 and by relevance of rho_hat0."""
    if market.is_polyhedral:
        best, z = _nfl_polyhedral(market)
        route = "lp"
    elif isinstance(market, IlliquidCurve):
        best, z = _nfl_illiquid(market)
        route = "parameter sweep"
    else:
        raise ValueError("no direct route for this market body")
    direct = best <= GDV_TOL
    rel = is_relevant(None, market)
    margins = {"max_sum_z": best, "relevance_margins": rel.margins}
    witnesses = {"z": z, "relevance": rel.witnesses}
    notes = [f"route (i): {route}", "route (ii): relevance of rho_hat0", FINITE_COLLAPSE_NOTE]
    if direct == rel.holds:
        verdict = verdict_of(direct)
    else:
        verdict = INCONCLUSIVE
        notes.append("routes disagree")
    rep = DiagnosticReport("nfl", verdict, margins, witnesses, notes)
    rep.witnesses["route_direct"] = direct
    rep.witnesses["route_relevance"] = rel.holds
    return rep


# --- coherent GDVs and separation ----------------------------------------------------

def _most_interior_zero_density(market: MarketModel):
    """max s s.t. q_k >= s, normals @ q <= 0, q in the simplex."""
    n = market.n
    D = np.asarray(market.zero_set_normals(), dtype=float).reshape(-1, n)
    A = np.hstack([-np.eye(n), np.ones((n, 1))])
    if D.size:
        A = np.vstack([A, np.hstack([D, np.zeros((D.shape[0], 1))])])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    res = solve_lp(LinearProgram(c, A, np.zeros(A.shape[0]),
                                 np.concatenate([np.ones(n), [0.0]])[None, :], [1.0],
                                 [(0, None)] * n + [(None, None)], maximize=True))
    if not res.ok:
        return None, -math.inf
    q = np.clip(res.x[:n], 0.0, None)
    return q / q.sum(), res.value


def coherent_gdv(market: MarketModel, check: bool = True) -> DiagnosticReport:
    """A coherent GDV exists iff some density has zero support value; returns E_q[-x]."""
    q, s = _most_interior_zero_density(market)
    if q is None:
        value, _ = market.min_support()
        return DiagnosticReport("coherent", FAILS, {"min_penalty": value}, {},
                                ["no density with zero support value"])
    sig = float(market.support_function(q))
    rho = worst_case(market.space, q)
    margins = {"penalty_at_density": sig, "min_weight": s}
    notes = ["tie-break: density maximizing its smallest weight"]
    ok = sig <= ZERO_TOL
    if check:
        g = is_gdv(rho, market)
        margins["is_gdv"] = g.holds
        ok = ok and g.holds
    rep = DiagnosticReport("coherent", verdict_of(ok), margins, {"density": q}, notes)
    rep.measure = rho if ok else None
    return rep


def relevant_coherent_gdv(market: MarketModel) -> DiagnosticReport:
    """An equivalent density with zero support value exists."""
    q, s = _most_interior_zero_density(market)
    if q is None:
        return DiagnosticReport("relevant-coherent", FAILS, {"max_min_weight": -math.inf}, {},
                                ["no density with zero support value"])
    ok = s > ZERO_TOL
    rep = DiagnosticReport("relevant-coherent", verdict_of(ok),
                           {"max_min_weight": s, "penalty_at_density": float(market.support_function(q))},
                           {"density": q})
    if ok:
        rep.measure = worst_case(market.space, q)
    return rep


def b_delta_generators(space: SampleSpace, delta: float) -> np.ndarray:
    """Vertices of {z : 0 <= z <= 1, E[z] >= delta}."""
    n = space.n
    p = space.probs
    out = []
    for bits in itertools.product((0.0, 1.0), repeat=n):
        z = np.array(bits)
        if p @ z >= delta - 1e-15:
            out.append(z)
    for k in range(n):
        others = [j for j in range(n) if j != k]
        for bits in itertools.product((0.0, 1.0), repeat=n - 1):
            z = np.zeros(n)
            z[others] = bits
            t = (delta - p @ z) / p[k]
            if 0 < t < 1:
                z[k] = t
                out.append(z)
    return np.unique(np.array(out), axis=0)


def _separate_polyhedral(market, B):
    n = market.n
    groups = market.groups()
    D = market.recession()
    ng = len(groups)
    nv = n + 1 + ng
    rows = []
    for b in B:
        r = np.zeros(nv)
        r[:n] = -b
        r[n] = 1.0
        rows.append(r)
    for g, G in enumerate(groups):
        for row in G:
            r = np.zeros(nv)
            r[:n] = row
            r[n + 1 + g] = -1.0
            rows.append(r)
    for d in D:
        r = np.zeros(nv)
        r[:n] = d
        rows.append(r)
    A = np.array(rows)
    eq = np.concatenate([np.ones(n), np.zeros(1 + ng)])[None, :]
    bounds = [(0, None)] * n + [(None, None)] * (1 + ng)
    c = np.concatenate([np.zeros(n), [1.0], -np.ones(ng)])
    res = solve_lp(LinearProgram(c, A, np.zeros(len(rows)), eq, [1.0], bounds, maximize=True))
    if not res.ok:
        return -math.inf, None
    gap = res.value
    # tie-break among optimal densities: largest smallest weight
    A2 = np.vstack([np.hstack([A, np.zeros((A.shape[0], 1))]),
                    np.concatenate([-c, [0.0]])[None, :],
                    np.hstack([-np.eye(n), np.zeros((n, 1 + ng)), np.ones((n, 1))])])
    b2 = np.concatenate([np.zeros(len(rows)), [-(gap - 1e-10)], np.zeros(n)])
    c2 = np.zeros(nv + 1)
    c2[-1] = 1.0
    res2 = solve_lp(LinearProgram(c2, A2, b2, np.hstack([eq, [[0.0]]]), [1.0], bounds + [(None, None)],
                                  maximize=True))
    q = res2.x[:n] if res2.ok else res.x[:n]
    q = np.clip(q, 0, None)
    return gap, q / q.sum()


def _separate_illiquid(market: IlliquidCurve, B):
    S = market.S
    lo, hi = market.interval

    def h(q):
        return float(np.min(B @ q) - market.support_function(q))

    if market.n == 2:
        t, v = minimize_convex_1d(lambda t: -h(np.array([t, 1 - t])), (0.0, 1.0), tol=1e-12)
        return -v, np.array([t, 1 - t])

    def oracle(q):
        i = int(np.argmin(B @ q))
        a = float(np.clip(market.friction.best_position(q @ S), lo, hi))
        return h(q), B[i] - a * S

    res = maximize_concave_simplex(oracle, market.n, tol=1e-10)
    return res.value, res.x


def separate(market: MarketModel, B) -> DiagnosticReport:
    """Density q with sup_M E_q[m] < min over B of E_q[b]; B is given by its generators."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if np.any(B < 0):
        raise ValueError("B must consist of nonnegative claims")
    if market.is_polyhedral:
        gap, q = _separate_polyhedral(market, B)
    elif isinstance(market, IlliquidCurve):
        gap, q = _separate_illiquid(market, B)
    else:
        raise ValueError("no separation route for this market body")
    if not gap > ZERO_TOL:
        raise ValueError(f"B meets the closure of M (best gap {gap:.3g}); separation impossible")
    return DiagnosticReport("separate", HOLDS,
                            {"gap": gap, "support_at_density": float(market.support_function(q)),
                             "min_over_B": float(np.min(B @ q))},
                            {"density": q})


# --- extension consistency ----------------------------------------------------------------

def extension_consistency(rho: RiskMeasure, market: MarketModel, samples: int = 200, seed: int = 42,
                          delta: float = DELTA_MIN, assume_gdv: bool = False) -> DiagnosticReport:
    """Four routes to relevance of a GDV; they must agree."""
    if not assume_gdv:
        pre = is_gdv(rho, market, samples=200, seed=seed)
        if not pre.holds:
            raise ValueError("extension_consistency needs a GDV for the market")
    n = market.n
    rng = np.random.default_rng(seed)
    Z = np.vstack([np.eye(n), rng.uniform(0.1, 1.0, size=(samples, n)) *
                   (rng.random((samples, n)) < 0.6)])
    Z = Z[Z.sum(axis=1) > 0]
    Xr = rng.uniform(-2.0, 2.0, size=(Z.shape[0], n))
    X = np.vstack([Xr, Z, np.zeros_like(Z)])
    ZZ = np.vstack([Z, Z, Z])

    r1 = is_relevant(rho, market, delta).holds
    lhs = rho.batch(-X)
    m2 = lhs + market.rho_hat0(X - ZZ)
    m3 = lhs + market.superhedge(X - ZZ)
    i2, i3 = int(np.argmin(m2)), int(np.argmin(m3))
    r2 = bool(m2[i2] > ZERO_TOL)
    r3 = bool(m3[i3] > ZERO_TOL)
    ext = extended_market(rho)
    probes = np.vstack([delta * np.eye(n), delta * Z / Z.max(axis=1, keepdims=True)])
    members = ext.contains_batch(probes)
    r4 = not bool(members.any())
    routes = {"relevant": r1, "strict_rho_hat0": r2, "strict_rho0": r3, "extension_no_arbitrage": r4}
    vals = set(routes.values())
    verdict = verdict_of(r1) if len(vals) == 1 else INCONCLUSIVE
    witnesses = {"routes": routes, "x_rho_hat0": X[i2], "z_rho_hat0": ZZ[i2],
                 "x_rho0": X[i3], "z_rho0": ZZ[i3]}
    if members.any():
        witnesses["nonnegative_member"] = probes[int(np.argmax(members))]
    notes = [] if len(vals) == 1 else ["routes disagree"]
    return DiagnosticReport("extension", verdict,
                            {"min_margin_rho_hat0": float(m2[i2]), "min_margin_rho0": float(m3[i3])},
                            witnesses, notes)


# --- not-an-indifference-price certificate -----------------------------------------------

def indifference_obstruction(rho: RiskMeasure, market: MarketModel, anchors, probes=None,
                             min_excess: float = 1e-3) -> DiagnosticReport:
    """Certificate that rho is no indifference price.

    For rho = I(eta) the gap rho* - support equals eta* plus a constant and is
    convex. If the gap vanishes at the anchors but sits strictly above the chord
    at a convex combination of them, no such eta exists. ``probes`` are weight
    vectors over the anchors (default: pairwise midpoints).
    """
    if not rho.has_exact_penalty:
        raise ValueError("certificate needs an exact penalty")
    A = np.atleast_2d(np.asarray(anchors, dtype=float))
    if probes is None:
        probes = []
        for i, j in itertools.combinations(range(len(A)), 2):
            w = np.zeros(len(A))
            w[[i, j]] = 0.5
            probes.append(w)
    W = np.atleast_2d(np.asarray(probes, dtype=float))

    def gap(q):
        return rho.penalty(q) - float(market.support_function(q))

    ga = np.array([gap(a) for a in A])
    Q = W @ A
    gq = np.array([gap(q) for q in Q])
    excess = gq - W @ ga
    i = int(np.argmax(excess))
    anchors_ok = bool(np.all(np.abs(ga) <= ZERO_TOL))
    ok = anchors_ok and excess[i] > min_excess
    return DiagnosticReport("not-indifference", verdict_of(ok),
                            {"gap_at_anchors": ga, "max_excess_over_chord": float(excess[i]),
                             "penalty_at_probe": rho.penalty(Q[i]),
                             "market_penalty_at_probe": float(market.support_function(Q[i]))},
                            {"anchors": A, "probe": Q[i]})


# --- equivalence batteries ----------------------------------------------------------------

def cash_excluded(market: MarketModel, grid=CASH_GRID) -> DiagnosticReport:
    """c*1 is outside M for every grid constant c > 0."""
    inside = [float(c) for c in grid if market.contains(np.full(market.n, c))]
    return DiagnosticReport("cash-excluded", verdict_of(not inside), {"grid_size": len(grid)},
                            {"constants_inside": inside})


def gdv_equivalences(market: MarketModel, samples: int = 500, seed: int = 42) -> dict:
    """Verdicts of the four existence criteria; all four must coincide."""
    v0 = market.rho_hat0(np.zeros(market.n))
    return {
        "min_penalty_zero": gdv_exists(market).holds,
        "rho_hat0_normalized": bool(math.isfinite(v0) and abs(v0) <= GDV_TOL),
        "rho_hat0_is_gdv": is_gdv(rho_hat0_measure(market), market, samples, seed).holds,
        "cash_excluded": cash_excluded(market).holds,
    }


# --- truncations of countable examples ----------------------------------------------------

@dataclass
class TruncationFamily:
    family: str
    N: int
    market: MarketModel
    densities: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


def _geometric_probs(count: int, first: float = 0.5) -> np.ndarray:
    """first, first/2, ... with the remaining tail mass folded into the last atom."""
    p = first * 0.5 ** np.arange(count)
    p[-1] += 1.0 - p.sum()
    return p


FAMILY_MIN = {"counterexample-1": 2, "counterexample-2": 2, "geometric-S": 2, "indicator-grid": 2}


def build_truncation(family: str, N: int) -> TruncationFamily:
    if family not in FAMILY_MIN:
        raise ValueError(f"unknown truncation family {family!r}")
    if N < FAMILY_MIN[family]:
        raise ValueError(f"{family} needs N >= {FAMILY_MIN[family]}")

    if family == "counterexample-1":
        space = SampleSpace(_geometric_probs(N), tuple(f"w{k}" for k in range(1, N + 1)))
        market = Polytope(space, np.eye(N))
        dens = {}
        for m in range(1, N + 1):
            q = np.array([1.0 / m if k <= m - 1 else 2.0 ** (m - k - 1) / m for k in range(1, N + 1)])
            q[-1] = 2.0 ** (m - N) / m
            dens[f"Q_{m}"] = q
        notes = ["indicator generators; tail of each density folded into the last atom",
                 f"min penalty 1/N -> 0 while e_k in M breaks no-free-lunch at every N"]
        return TruncationFamily(family, N, market, dens, notes)

    if family == "counterexample-2":
        ks = np.arange(-N, N + 1)
        w = 0.5 ** np.abs(ks)
        space = SampleSpace(w / w.sum(), tuple(f"w{k}" for k in ks))
        n = ks.size
        gens = []
        for k in range(-N + 1, N + 1):
            g = np.zeros(n)
            g[k + N] = 1.0
            g[k - 1 + N] = -1.0
            gens.append(g)
        market = Polytope(space, np.array(gens))
        dens = {}
        for j in range(1, N + 1):
            for i in range(-N, N + 1):
                if i - j + 1 >= -N + 1 and i + j - 1 <= N:
                    dens[f"Q^{i}_{j}"] = np.maximum(1.0 / j - np.abs(ks - i) / j ** 2, 0.0)
        notes = [
            "window of atoms -N..N with difference generators e_k - e_(k-1)",
            "tents whose support lies in -N+1..N keep penalty 1/j^2",
            "DIVERGENCE: on the full integer lattice no equivalent density has zero penalty, "
            "but every finite window has one (the uniform density), so the equivalent "
            "zero-penalty condition holds here although it fails in the limit",
        ]
        return TruncationFamily(family, N, market, dens, notes)

    if family == "geometric-S":
        space = SampleSpace(_geometric_probs(N + 1), tuple(f"w{k}" for k in range(N + 1)))
        S = 0.5 ** np.arange(N + 1)
        market = ScaledBox(space, S[None, :], np.array([[0.0, 1.0]]))
        dens = {f"Q_{k}": space.indicator(k) for k in range(N + 1)}
        notes = [f"infimum of the penalty over point masses is 2^-N = {2.0 ** -N:g}; it reaches 0 only as N grows"]
        return TruncationFamily(family, N, market, dens, notes)

    space = SampleSpace(_geometric_probs(N), tuple(f"w{k}" for k in range(1, N + 1)))
    market = ScaledBox(space, np.eye(N), np.column_stack([np.zeros(N), np.ones(N)]))
    dens = {"P": space.probs.copy(), "uniform": np.full(N, 1.0 / N)}
    notes = ["only the penalty value 1 is stable under truncation",
             "DEGENERATE: at finite N the all-ones claim lies in M, so superhedging of 0 "
             "costs -1 instead of 0"]
    return TruncationFamily("indicator-grid", N, market, dens, notes)
