"""Named markets and the worked cases reproduced by ``gooddeal papercase``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from .markets import IlliquidCurve, Friction, MarketModel, Polytope, ScaledBox
from .riskmeasures import penalty_table
from .spaces import SampleSpace

INF = math.inf


def two_state_illiquid() -> IlliquidCurve:
    return IlliquidCurve(SampleSpace.uniform(2), np.array([1.0, -1.0]), Friction("quadratic", 1.0))


def scaled_half() -> ScaledBox:
    return ScaledBox(SampleSpace.uniform(2), np.array([[1.0, 0.5]]), np.array([[0.0, 1.0]]))


def monotone_cap(bounded: bool = True) -> ScaledBox:
    """{x <= 1} when bounded, else {x : x v 0 bounded}, on two atoms."""
    return ScaledBox(SampleSpace.uniform(2), np.ones((1, 2)), np.array([[0.0, 1.0 if bounded else INF]]))


def table_measure():
    """sup over q of E_q[-x] - |2q_1 - 1|/4; the penalty is piecewise linear with kinks at 0, 1/2, 1."""
    sp = SampleSpace.uniform(2)
    return penalty_table(sp, [[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]], [0.25, 0.0, 0.25], name="kinked-table")


def fixtures() -> dict:
    """Markets used by the equivalence batteries."""
    rng = np.random.default_rng(7)
    out = {
        "illiquid-two-state": two_state_illiquid(),
        "scaled-half": scaled_half(),
        "minus-orthant": Polytope(SampleSpace.uniform(3)),
        "monotone-cap": monotone_cap(True),
        "monotone-unbounded": monotone_cap(False),
        "two-sided-line": ScaledBox(SampleSpace.uniform(2), np.array([[1.0, -1.0]]), np.array([[-INF, INF]])),
        "exp-illiquid": IlliquidCurve(SampleSpace(np.array([0.5, 0.3, 0.2])), np.array([1.0, 0.0, -2.0]),
                                      Friction("exp", 0.2), (-2.0, 3.0)),
        "null-direction": Polytope(SampleSpace.uniform(2), np.array([[1.0, 0.0]])),
        "random-polytope": Polytope(SampleSpace.from_weights([1, 2, 3, 4]), rng.uniform(-2, 2, size=(3, 4))),
    }
    for fam, N in (("counterexample-1", 4), ("counterexample-1", 8), ("counterexample-2", 3),
                   ("geometric-S", 6), ("indicator-grid", 4)):
        out[f"{fam}-{N}"] = dg.build_truncation(fam, N).market
    return out


# --- worked cases ---------------------------------------------------------------------

@dataclass
class CaseRow:
    label: str
    expected: object
    computed: object
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        e, c = self.expected, self.computed
        if isinstance(e, (bool, str)) or e is None:
            return e == c
        if isinstance(e, float) and math.isinf(e):
            return e == c
        return abs(float(c) - float(e)) <= self.tol

    def to_dict(self):
        return {"label": self.label, "expected": self.expected, "computed": self.computed,
                "tol": self.tol, "pass": self.passed}


@dataclass
class CaseResult:
    case: str
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _illiquid_two_state(size):
    M = two_state_illiquid()
    grid = np.round(np.arange(0, 21) / 20, 12)
    Q = np.column_stack([grid, 1 - grid])
    err = float(np.max(np.abs(M.support_function(Q) - (2 * grid - 1) ** 2 / 4)))
    rho = table_measure()
    x = np.array([-0.5, 0.0])
    rows = [
        CaseRow("penalty grid vs (2q-1)^2/4, max error", 0.0, err),
        CaseRow("rho_hat0(-1/2 at w1)", 5 / 16, M.rho_hat0(x)),
        CaseRow("kinked-table value", 0.25, rho(x)),
        CaseRow("kinked-table is a GDV", True, dg.is_gdv(rho, M).holds),
        CaseRow("kinked-table is not an indifference price", True,
                dg.indifference_obstruction(rho, M, [[1, 0], [0.5, 0.5], [0, 1]]).holds),
        CaseRow("GDV exists", True, dg.gdv_exists(M).holds),
        CaseRow("relevant coherent GDV weight on w1", 0.5,
                float(dg.relevant_coherent_gdv(M).witnesses["density"][0])),
    ]
    return rows, ["positions beyond |alpha| = 1/2 are dominated"]


def _scaled_half(size):
    M = scaled_half()
    rows = [
        CaseRow("min penalty over the simplex", 0.5, M.min_support()[0]),
        CaseRow("rho_hat0(0)", -0.5, M.rho_hat0(np.zeros(2))),
        CaseRow("superhedge(0)", -0.5, M.superhedge(np.zeros(2))),
        CaseRow("GDV exists", False, dg.gdv_exists(M).holds),
        CaseRow("coherent GDV exists", False, dg.coherent_gdv(M).holds),
    ]
    return rows, []


def _monotone_cap(size):
    capped, open_ = monotone_cap(True), monotone_cap(False)
    rows = [
        CaseRow("superhedge(0), cap 1", -1.0, capped.superhedge(np.zeros(2))),
        CaseRow("superhedge(0), no cap", -INF, open_.superhedge(np.zeros(2))),
        CaseRow("rho_hat0(0), no cap", -INF, open_.rho_hat0(np.zeros(2))),
        CaseRow("GDV exists, cap 1", False, dg.gdv_exists(capped).holds),
    ]
    return rows, ["without the cap no density has finite support value"]


def _geometric(size):
    N = size or 10
    fam = dg.build_truncation("geometric-S", N)
    M = fam.market
    pm = min(M.support_function(q) for q in fam.densities.values())
    rows = [
        CaseRow("inf penalty over point masses", 2.0 ** -N, pm, 1e-12),
        CaseRow("min penalty over the simplex", 2.0 ** -N, M.min_support()[0], 1e-12),
        CaseRow("GDV exists at this N", False, dg.gdv_exists(M).holds),
    ]
    return rows, fam.notes


def _indicator_grid(size):
    N = size or 8
    fam = dg.build_truncation("indicator-grid", N)
    M = fam.market
    rows = [CaseRow(f"penalty at {k}", 1.0, float(M.support_function(q))) for k, q in fam.densities.items()]
    rows.append(CaseRow("superhedge(0) at finite N", -1.0, M.superhedge(np.zeros(N))))
    return rows, fam.notes


def _counterexample_1(size):
    N = size or 8
    fam = dg.build_truncation("counterexample-1", N)
    M = fam.market
    rows = [CaseRow("min penalty = 1/N", 1.0 / N, M.min_support()[0])]
    for m in sorted({2, N}):
        rows.append(CaseRow(f"penalty at Q_{m}", 1.0 / m, float(M.support_function(fam.densities[f"Q_{m}"]))))
    rows.append(CaseRow("no free lunch", False, dg.nfl_check(M).holds))
    return rows, fam.notes


def _counterexample_2(size):
    N = size or 8
    fam = dg.build_truncation("counterexample-2", N)
    M = fam.market
    rows = []
    for j in (1, 2, 3):
        if j <= N and f"Q^0_{j}" in fam.densities:
            rows.append(CaseRow(f"penalty at Q^0_{j}", 1.0 / j ** 2,
                                float(M.support_function(fam.densities[f"Q^0_{j}"]))))
    rows.append(CaseRow("rho_hat0 relevant at every atom", True, dg.is_relevant(None, M).holds))
    rows.append(CaseRow("equivalent zero-penalty density (finite window)", True,
                        dg.relevant_coherent_gdv(M).holds))
    return rows, fam.notes + [dg.FINITE_COLLAPSE_NOTE]


WORKED_CASES = {
    "illiquid-two-state": _illiquid_two_state,
    "scaled-half": _scaled_half,
    "monotone-cap": _monotone_cap,
    "geometric-S": _geometric,
    "indicator-grid": _indicator_grid,
    "counterexample-1": _counterexample_1,
    "counterexample-2": _counterexample_2,
}


def run_worked_case(case: str, size=None) -> CaseResult:
    if case not in WORKED_CASES:
        raise ValueError(f"unknown case {case!r}; choose from {sorted(WORKED_CASES)}")
    rows, notes = WORKED_CASES[case](size)
    return CaseResult(case, rows, list(notes))


def named_market(name: str) -> MarketModel:
    table = fixtures()
    if name in table:
        return table[name]
    for fam in dg.FAMILY_MIN:
        if name.startswith(fam + "-") and name[len(fam) + 1:].isdigit():
            return dg.build_truncation(fam, int(name[len(fam) + 1:])).market
    raise KeyError(name)
