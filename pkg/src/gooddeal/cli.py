"""Command-line entry point: ``gooddeal {value,check,papercase,indiff,norm}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import diagnostics as dg
from .cases import WORKED_CASES, named_market, run_worked_case
from .markets import MarketModel, market_from_dict
from .reports import DiagnosticReport
from .riskmeasures import (EmptyZeroSet, ImproperValuation, RiskMeasure, axioms_check, entropic,
                           hedged_infimum, indifference_measure, penalty_table, rho_hat0_measure,
                           shortfall_measure, superhedge_measure, worst_case)
from .spaces import SampleSpace, YoungFunction, luxemburg_norm

EXIT_CODES = {"holds": 0, "fails": 1, "inconclusive": 2}
EXIT_USAGE, EXIT_NUMERIC = 64, 65
CHECKS = ("gdv-exists", "is-gdv", "relevant", "nfl", "coherent", "relevant-coherent", "first-kind",
          "extension", "separate", "axioms")
PROB_DRIFT = 1e-9


class UsageError(Exception):
    pass


@dataclass
class MarketFile:
    space: SampleSpace
    market: MarketModel
    claims: dict = field(default_factory=dict)
    measures: dict = field(default_factory=dict)


def parse_market_file(doc: dict) -> MarketFile:
    try:
        sp = doc["space"]
        probs = np.asarray(sp["probs"], dtype=float)
        total = probs.sum()
        if abs(total - 1.0) > PROB_DRIFT:
            raise UsageError(f"probabilities sum to {total!r}")
        space = SampleSpace(probs / total, tuple(sp.get("atoms", ())))
        market = market_from_dict(space, doc["market"])
        claims = {k: np.asarray(v, dtype=float) for k, v in doc.get("claims", {}).items()}
        for k, v in claims.items():
            if v.shape != (space.n,):
                raise UsageError(f"claim {k!r} has wrong length")
        return MarketFile(space, market, claims, dict(doc.get("measures", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad market file: {exc}") from exc


def dump_market_file(mf: MarketFile) -> str:
    doc = {
        "space": {"atoms": list(mf.space.atoms), "probs": mf.space.probs.tolist()},
        "market": mf.market.to_dict(),
        "claims": {k: v.tolist() for k, v in mf.claims.items()},
        "measures": mf.measures,
    }
    return json.dumps(doc, sort_keys=True)


def load_market(arg: str) -> MarketFile:
    path = Path(arg)
    if path.exists():
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{arg}: {exc}") from exc
        return parse_market_file(doc)
    try:
        market = named_market(arg)
    except KeyError:
        raise UsageError(f"no market file or built-in market named {arg!r}") from None
    return MarketFile(market.space, market)


def parse_claim(arg, mf: MarketFile) -> np.ndarray:
    if arg is None:
        raise UsageError("--claim is required")
    if arg in mf.claims:
        return mf.claims[arg]
    try:
        x = np.asarray(json.loads(arg), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError):
        raise UsageError(f"claim {arg!r} is neither a named claim nor a JSON list") from None
    if x.shape != (mf.space.n,):
        raise UsageError(f"claim has {x.size} entries, expected {mf.space.n}")
    return x


def build_measure(desc, mf: MarketFile) -> RiskMeasure:
    if desc is None:
        desc = "rho_hat0"
    if isinstance(desc, str):
        if desc in mf.measures:
            desc = mf.measures[desc]
        else:
            try:
                desc = json.loads(desc)
            except json.JSONDecodeError:
                desc = {"kind": desc}
    if isinstance(desc, str):
        desc = {"kind": desc}
    kind = desc.get("kind")
    sp, M = mf.space, mf.market
    try:
        if kind == "rho_hat0":
            return rho_hat0_measure(M)
        if kind == "superhedge":
            return superhedge_measure(M)
        if kind == "entropic":
            return entropic(sp, float(desc.get("gamma", 1.0)))
        if kind == "worst_case":
            return worst_case(sp, desc["q"])
        if kind == "penalty_table":
            return penalty_table(sp, desc["densities"], desc["penalties"])
        if kind == "shortfall":
            loss = desc.get("loss", {"kind": "power", "p": 2.0})
            phi = YoungFunction(**loss) if isinstance(loss, dict) else YoungFunction(loss)
            return shortfall_measure(sp, M, phi, float(desc.get("delta", 0.04)),
                                     bool(desc.get("normalized", False)))
        if kind == "indifference":
            return indifference_measure(build_measure(desc.get("eta", "entropic"), mf), M)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad measure descriptor: {exc}") from exc
    raise UsageError(f"unknown measure kind {kind!r}")


def _num(v):
    v = float(v)
    return None if not math.isfinite(v) else v


def _emit(obj, table: bool = False):
    if table and isinstance(obj, dict) and "rows" in obj:
        rows = obj["rows"]
        w = max(len(r["label"]) for r in rows) if rows else 5
        print(f"{'check':<{w}}  {'expected':>22}  {'computed':>22}  pass")
        for r in rows:
            print(f"{r['label']:<{w}}  {str(r['expected']):>22}  {str(r['computed']):>22}  "
                  f"{'yes' if r['pass'] else 'NO'}")
        for note in obj.get("notes", []):
            print(f"note: {note}")
        return
    if table and isinstance(obj, dict):
        w = max(len(k) for k in obj)
        for k in sorted(obj):
            print(f"{k:<{w}}  {obj[k]}")
        return
    print(json.dumps(obj, sort_keys=True))


def cmd_value(args) -> int:
    mf = load_market(args.market)
    x = parse_claim(args.claim, mf)
    rho = build_measure(args.measure, mf)
    out = {"value": _num(rho(x))}
    if args.bound:
        out["good_deal_bound"] = [_num(-rho(x)), _num(rho(-x))]
        out["no_arbitrage_bound"] = [_num(-mf.market.superhedge(x)), _num(mf.market.superhedge(-x))]
    _emit(out, args.table)
    return 0


def _report(args, mf: MarketFile) -> DiagnosticReport:
    M = mf.market
    name = args.check
    if name == "gdv-exists":
        return dg.gdv_exists(M)
    if name == "is-gdv":
        return dg.is_gdv(build_measure(args.measure, mf), M, seed=args.seed)
    if name == "relevant":
        rho = None if args.measure in (None, "rho_hat0") else build_measure(args.measure, mf)
        return dg.is_relevant(rho, M)
    if name == "nfl":
        return dg.nfl_check(M)
    if name == "coherent":
        return dg.coherent_gdv(M)
    if name == "relevant-coherent":
        return dg.relevant_coherent_gdv(M)
    if name == "first-kind":
        return dg.first_kind_arbitrage(M)
    if name == "extension":
        return dg.extension_consistency(build_measure(args.measure, mf), M, seed=args.seed)
    if name == "separate":
        if args.bset:
            B = np.asarray(json.loads(args.bset), dtype=float)
        elif args.delta is not None:
            B = dg.b_delta_generators(mf.space, args.delta)
        else:
            B = np.ones((1, mf.space.n))
        return dg.separate(M, B)
    if name == "axioms":
        return axioms_check(build_measure(args.measure, mf), args.samples, args.seed)
    raise UsageError(f"unknown check {name!r}")


def cmd_check(args) -> int:
    mf = load_market(args.market)
    rep = _report(args, mf)
    _emit(rep.to_dict(), args.table)
    return EXIT_CODES[rep.verdict]


def cmd_papercase(args) -> int:
    res = run_worked_case(args.case, args.size)
    out = {"case": res.case, "rows": [r.to_dict() for r in res.rows], "notes": res.notes, "pass": res.passed}
    out = json.loads(json.dumps(out, default=_num))
    _emit(out, args.table)
    return 0 if res.passed else 1


def cmd_indiff(args) -> int:
    mf = load_market(args.market)
    x = parse_claim(args.claim, mf)
    eta = build_measure(args.measure or "entropic", mf)
    I = indifference_measure(eta, mf.market)
    inner = float(hedged_infimum(eta, mf.market, x[None, :])[0])
    out = {"price": _num(I(x)), "inner_inf": _num(inner),
           "inner_inf_at_zero": _num(I.descriptor["inner_inf_at_zero"])}
    _emit(out, args.table)
    return 0


def cmd_norm(args) -> int:
    if args.probs:
        space = SampleSpace.from_weights(json.loads(args.probs))
        mf = MarketFile(space, None)
    else:
        mf = load_market(args.market)
    x = parse_claim(args.claim, mf)
    young = json.loads(args.young) if args.young.startswith("{") else {"kind": args.young}
    try:
        phi = YoungFunction(**young)
    except TypeError as exc:
        raise UsageError(f"bad Young function: {exc}") from exc
    _emit({"norm": luxemburg_norm(phi, mf.space, x)}, args.table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gooddeal", description="No-arbitrage and good-deal bounds on finite markets.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--market", help="market JSON file or built-in market name")
    common.add_argument("--claim", help="named claim or inline JSON list")
    common.add_argument("--measure", help="measure descriptor: JSON or bare kind")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--table", action="store_true", help="aligned text instead of JSON")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("value", parents=[common], help="evaluate a measure on a claim")
    v.add_argument("--bound", action="store_true", help="also print good-deal and no-arbitrage bounds")
    v.set_defaults(func=cmd_value)

    c = sub.add_parser("check", parents=[common], help="run a diagnostic")
    c.add_argument("check", choices=CHECKS)
    c.add_argument("--bset", help="JSON list of generators of B for 'separate'")
    c.add_argument("--delta", type=float, help="use the B_delta set for 'separate'")
    c.set_defaults(func=cmd_check)

    pc = sub.add_parser("papercase", parents=[common], help="reproduce a worked case")
    pc.add_argument("case", choices=sorted(WORKED_CASES))
    pc.add_argument("--size", type=int)
    pc.set_defaults(func=cmd_papercase)

    i = sub.add_parser("indiff", parents=[common], help="risk indifference price")
    i.set_defaults(func=cmd_indiff)

    n = sub.add_parser("norm", parents=[common], help="Luxemburg norm of a claim")
    n.add_argument("--young", default="power", help='Young function: JSON like {"kind": "power", "p": 2}')
    n.add_argument("--probs", help="JSON list of reference probabilities (instead of --market)")
    n.set_defaults(func=cmd_norm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        if args.command not in ("papercase", "norm") and not args.market:
            raise UsageError("--market is required")
        if args.command == "norm" and not (args.market or args.probs):
            raise UsageError("--market or --probs is required")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImproperValuation, EmptyZeroSet) as exc:
        print(json.dumps({"status": type(exc).__name__, "message": str(exc)}, sort_keys=True))
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
