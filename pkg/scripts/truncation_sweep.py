"""Minimum market penalty and no-free-lunch verdict as the truncation size grows."""

import argparse
import json
from dataclasses import asdict, dataclass

from gooddeal import diagnostics as dg


@dataclass
class Config:
    families: tuple = tuple(sorted(dg.FAMILY_MIN))
    sizes: tuple = (2, 4, 8, 16)
    as_json: bool = False


def sweep(cfg: Config) -> list:
    rows = []
    for fam in cfg.families:
        for N in cfg.sizes:
            t = dg.build_truncation(fam, N)
            value, _ = t.market.min_support()
            rows.append({"family": fam, "N": N, "atoms": t.market.n, "min_penalty": value,
                         "gdv_exists": dg.gdv_exists(t.market).holds, "nfl": dg.nfl_check(t.market).holds})
    return rows


def main(cfg: Config) -> None:
    rows = sweep(cfg)
    if cfg.as_json:
        print(json.dumps({"config": asdict(cfg), "rows": rows}, indent=1))
        return
    print(f"{'family':<18}{'N':>4}{'atoms':>7}{'min penalty':>16}  gdv   nfl")
    for r in rows:
        print(f"{r['family']:<18}{r['N']:>4}{r['atoms']:>7}{r['min_penalty']:>16.3e}  "
              f"{str(r['gdv_exists']):<5} {r['nfl']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=list(Config.sizes))
    ap.add_argument("--families", nargs="+", choices=sorted(dg.FAMILY_MIN), default=list(Config.families))
    ap.add_argument("--json", action="store_true")
    a = ap.parse_args()
    main(Config(tuple(a.families), tuple(a.sizes), a.json))
