"""Small dense numerical kernels.

Everything the valuation code needs reduces to one of: a dense LP, a 1-d
convex minimization, a concave maximization over the probability simplex, or a
monotone root. Problem sizes here are tiny (a few hundred variables at most),
so the LP is a plain tableau simplex with Bland's rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class LinearProgram:
    """min (or max) c @ x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi.

    ``bounds`` is a list of (lo, hi) pairs; None or +-inf marks a missing side.
    Default bounds are (0, None) for every variable.
    """

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n)
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n)
        if self.bounds is None:
            self.bounds = [(0.0, math.inf)] * n
        if len(self.bounds) != n:
            raise ValueError("one (lo, hi) pair per variable expected")
        clean = []
        for lo, hi in self.bounds:
            lo = -math.inf if lo is None else float(lo)
            hi = math.inf if hi is None else float(hi)
            if lo > hi:
                raise ValueError(f"empty variable range [{lo}, {hi}]")
            clean.append((lo, hi))
        self.bounds = clean
        for arr in (self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")


def _rows(A, b, n):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, n):
        raise ValueError(f"constraint block has shape {A.shape}, expected ({b.size}, {n})")
    return A, b


@dataclass
class SolveResult:
    status: str
    value: float = math.nan
    x: Optional[np.ndarray] = None
    dual_ub: Optional[np.ndarray] = None
    dual_eq: Optional[np.ndarray] = None
    dual_value: float = math.nan
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(tab: np.ndarray, r: int, c: int) -> None:
    tab[r] /= tab[r, c]
    col = tab[:, c].copy()
    col[r] = 0.0
    tab -= np.outer(col, tab[r])


def _run_simplex(tab, basis, ncols, max_iter):
    """Bland-rule pivots on columns [0, ncols). Returns 'optimal' or 'unbounded'."""
    m = tab.shape[0] - 1
    for it in range(max_iter):
        red = tab[m, :ncols]
        cand = np.flatnonzero(red < -PIVOT_TOL)
        if cand.size == 0:
            return "optimal", it
        enter = int(cand[0])
        col = tab[:m, enter]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            return "unbounded", it
        ratios = tab[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        leave = int(min(ties, key=lambda i: basis[i]))
        _pivot(tab, leave, enter)
        basis[leave] = enter
    return "iteration_limit", max_iter


def solve_lp(lp: LinearProgram, max_iter: int = 50_000) -> SolveResult:
    """Two-phase dense simplex. Infeasible/unbounded are statuses, not exceptions."""
    n = lp.c.size
    # x = shift + T z with z >= 0
    cols, shift, extra_rows = [], np.zeros(n), []
    for j, (lo, hi) in enumerate(lp.bounds):
        e = np.zeros(n)
        e[j] = 1.0
        if math.isfinite(lo):
            shift[j] = lo
            cols.append(e)
            if math.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            shift[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    T = np.array(cols).T if cols else np.zeros((n, 0))
    N = T.shape[1]
    c_std = lp.c @ T
    c0 = float(lp.c @ shift)
    if lp.maximize:
        c_std, c0 = -c_std, -c0

    A_ub = lp.A_ub @ T
    b_ub = lp.b_ub - lp.A_ub @ shift
    if extra_rows:
        B = np.zeros((len(extra_rows), N))
        for i, (zc, ub) in enumerate(extra_rows):
            B[i, zc] = 1.0
        A_ub = np.vstack([A_ub, B])
        b_ub = np.concatenate([b_ub, [ub for _, ub in extra_rows]])
    A_eq = lp.A_eq @ T
    b_eq = lp.b_eq - lp.A_eq @ shift
    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    m = m1 + m2

    A = np.zeros((m, N + m1))
    A[:m1, :N] = A_ub
    A[:m1, N:] = np.eye(m1)
    A[m1:, :N] = A_eq
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign
    ncol = N + m1

    need_art = [i for i in range(m) if i >= m1 or sign[i] < 0]
    n_art = len(need_art)
    tab = np.zeros((m + 1, ncol + n_art + 1))
    tab[:m, :ncol] = A
    tab[:m, -1] = b
    basis = [0] * m
    for i in range(m1):
        if sign[i] > 0:
            basis[i] = N + i
    for a, i in enumerate(need_art):
        tab[i, ncol + a] = 1.0
        basis[i] = ncol + a

    iters = 0
    if n_art:
        tab[m, :] = 0.0
        for i in need_art:
            tab[m, :] -= tab[i, :]
        for a in range(n_art):
            tab[m, ncol + a] = 0.0
        status, it = _run_simplex(tab, basis, ncol + n_art, max_iter)
        iters += it
        if -tab[m, -1] > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return SolveResult("infeasible", iterations=iters)
        keep = []
        for i in range(m):
            if basis[i] >= ncol:
                row = tab[i, :ncol]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size:
                    _pivot(tab, i, int(cand[0]))
                    basis[i] = int(cand[0])
                    keep.append(i)
            else:
                keep.append(i)
        tab = np.vstack([tab[keep][:, list(range(ncol)) + [tab.shape[1] - 1]], np.zeros((1, ncol + 1))])
        basis = [basis[i] for i in keep]
        rows_kept = keep
    else:
        tab = np.delete(tab, np.s_[ncol:ncol], axis=1)
        rows_kept = list(range(m))

    mk = len(basis)
    cfull = np.concatenate([c_std, np.zeros(m1)])
    tab[mk, :ncol] = cfull - cfull[basis] @ tab[:mk, :ncol]
    tab[mk, -1] = -(cfull[basis] @ tab[:mk, -1])
    status, it = _run_simplex(tab, basis, ncol, max_iter)
    iters += it
    if status != "optimal":
        return SolveResult(status, value=-math.inf if status == "unbounded" else math.nan,
                           iterations=iters)

    Ak = A[rows_kept]
    bk = b[rows_kept]
    Bmat = Ak[:, basis]
    try:
        xb = np.linalg.solve(Bmat, bk)
        y = np.linalg.solve(Bmat.T, cfull[basis])
    except np.linalg.LinAlgError:
        xb = tab[:mk, -1].copy()
        y = np.zeros(mk)
    z = np.zeros(ncol)
    z[basis] = np.maximum(xb, 0.0)
    x = shift + T @ z[:N]
    value = float(c_std @ z[:N]) + c0
    dual_value = float(y @ bk) + c0

    y_full = np.zeros(m)
    y_full[rows_kept] = y
    y_full *= sign
    if lp.maximize:
        value, dual_value, y_full = -value, -dual_value, -y_full
    return SolveResult(
        "optimal", value=value, x=x,
        dual_ub=y_full[: lp.A_ub.shape[0]], dual_eq=y_full[m1:],
        dual_value=dual_value, iterations=iters,
    )


def _golden(f, lo, hi, tol):
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        for xx, ff in ((c, fc), (d, fd)):
            if ff < best_f:
                best_x, best_f = xx, ff
    return best_x, best_f


def minimize_convex_1d(f: Callable[[float], float], bracket, tol: float = 1e-10):
    """Golden-section search; returns (argmin, min) with the endpoints also tried."""
    lo, hi = (float(v) for v in bracket)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"bad bracket [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def g(t):
        v = float(f(t))
        if math.isnan(v) or v == -math.inf:
            raise ValueError(f"objective returned {v} at {t}")
        return v

    if hi - lo <= tol:
        t = 0.5 * (lo + hi)
        return t, g(t)
    x, v = _golden(g, lo, hi, tol)
    for end in (lo, hi):
        fe = g(end)
        if fe < v:
            x, v = end, fe
    return x, v


def golden_batch(f, lo, hi, tol: float = 1e-12):
    """Vectorized golden section: f maps an array of points (one per row) to values.

    ``lo`` and ``hi`` are arrays of per-row brackets. Returns (argmin, min) arrays.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x = np.where(fc <= fd, c, d)
    best_f = np.minimum(fc, fd)
    width = float(np.max(b - a, initial=0.0))
    steps = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INVPHI)))
    for _ in range(steps):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = np.where(left, b - INVPHI * (b - a), d)
        d_new = np.where(left, c, a + INVPHI * (b - a))
        probe = np.where(left, c_new, d_new)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
        better = fp < best_f
        best_x = np.where(better, probe, best_x)
        best_f = np.where(better, fp, best_f)
    for end in (np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)):
        fe = f(end)
        better = fe < best_f
        best_x = np.where(better, end, best_x)
        best_f = np.where(better, fe, best_f)
    return best_x, best_f


def bisect_root(g: Callable[[float], float], bracket, tol: float = 1e-12) -> float:
    """Root of a monotone g with a sign change on the bracket."""
    lo, hi = (float(v) for v in bracket)
    glo, ghi = g(lo), g(hi)
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    if np.sign(glo) == np.sign(ghi):
        raise ValueError("no sign change on bracket")
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0:
            return mid
        if np.sign(gm) == np.sign(glo):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def maximize_concave_simplex(
    oracle: Callable[[np.ndarray], tuple],
    n: int,
    tol: float = 1e-9,
    A_ub: Optional[np.ndarray] = None,
    max_iter: int = 2000,
) -> SolveResult:
    """Kelley's cutting-plane method for max h(q) over {q in simplex, A_ub q <= 0}.

    ``oracle(q)`` returns (h(q), supergradient). Stops when the cutting-plane
    upper bound is within ``tol`` of the best value seen; the returned value is
    always an evaluated h, hence a lower bound on the true maximum.
    """
    A_dom = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    feas = solve_lp(LinearProgram(np.zeros(n), A_ub=A_dom if A_dom.size else None,
                                  b_ub=np.zeros(A_dom.shape[0]) if A_dom.size else None,
                                  A_eq=np.ones((1, n)), b_eq=[1.0]))
    if not feas.ok:
        return SolveResult("infeasible", value=-math.inf)

    starts = [feas.x] + [np.eye(n)[k] for k in range(n)] + [np.full(n, 1.0 / n)]
    cuts_g, cuts_c = [], []
    best_q, best_v = None, -math.inf
    for q in starts:
        if A_dom.size and np.any(A_dom @ q > 1e-12):
            continue
        v, g = oracle(q)
        g = np.asarray(g, dtype=float)
        cuts_g.append(g)
        cuts_c.append(v - g @ q)
        if v > best_v:
            best_q, best_v = q, v

    upper = math.inf
    for it in range(max_iter):
        G = np.array(cuts_g)
        k = G.shape[0]
        # variables (q, t): maximize t, t - g.q <= c, domain rows, sum q = 1
        A = np.hstack([-G, np.ones((k, 1))])
        b = np.array(cuts_c)
        if A_dom.size:
            A = np.vstack([A, np.hstack([A_dom, np.zeros((A_dom.shape[0], 1))])])
            b = np.concatenate([b, np.zeros(A_dom.shape[0])])
        c = np.zeros(n + 1)
        c[-1] = 1.0
        res = solve_lp(LinearProgram(c, A_ub=A, b_ub=b,
                                     A_eq=np.concatenate([np.ones(n), [0.0]])[None, :], b_eq=[1.0],
                                     bounds=[(0, None)] * n + [(None, None)], maximize=True))
        if not res.ok:
            break
        upper = min(upper, res.value)
        q = np.clip(res.x[:n], 0.0, None)
        q /= q.sum()
        v, g = oracle(q)
        g = np.asarray(g, dtype=float)
        if v > best_v:
            best_q, best_v = q, v
        if upper - best_v <= tol:
            return SolveResult("optimal", value=best_v, x=best_q, iterations=it + 1,
                               info={"upper": upper})
        cuts_g.append(g)
        cuts_c.append(v - g @ q)
    return SolveResult("iteration_limit", value=best_v, x=best_q, iterations=max_iter,
                       info={"upper": upper})
