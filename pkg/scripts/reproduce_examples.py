"""Run every worked case and print its check table."""

import argparse
from dataclasses import dataclass
from typing import Optional

from gooddeal.cases import WORKED_CASES, run_worked_case


@dataclass
class Config:
    size: Optional[int] = None
    cases: tuple = tuple(sorted(WORKED_CASES))


def main(cfg: Config) -> int:
    failed = []
    for case in cfg.cases:
        res = run_worked_case(case, cfg.size)
        print(f"== {case}: {'pass' if res.passed else 'FAIL'}")
        for row in res.rows:
            print(f"   {row.label:<50} expected {row.expected!s:<22} computed {row.computed!s:<22}"
                  f" {'ok' if row.passed else 'MISMATCH'}")
        for note in res.notes:
            print(f"   note: {note}")
        if not res.passed:
            failed.append(case)
    return 1 if failed else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, help="truncation size for the countable families")
    ap.add_argument("cases", nargs="*", help=f"subset of {sorted(WORKED_CASES)}")
    a = ap.parse_args()
    unknown = set(a.cases) - set(WORKED_CASES)
    if unknown:
        ap.error(f"unknown cases {sorted(unknown)}")
    raise SystemExit(main(Config(a.size, tuple(a.cases) or Config.cases)))
