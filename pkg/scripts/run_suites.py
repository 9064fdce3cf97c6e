"""Run the inequality suites for the bundled configurations and write reports.

    python3 scripts/run_suites.py --out reports
    python3 scripts/run_suites.py --config scripts/configs/variable_exponent.json --suites riesz sharp_maximal
"""

import argparse
import sys
import time
from pathlib import Path

from gorlicz.harness import SuiteConfig, emit_report, run_suite

HERE = Path(__file__).resolve().parent
DEFAULT_CONFIGS = sorted((HERE / "configs").glob("*.json"))
EXIT = {"pass": 0, "fail": 1, "inconclusive": 2}
RANK = ["pass", "inconclusive", "fail"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", action="append", type=Path, help="config file (repeatable)")
    ap.add_argument("--suites", nargs="+", help="restrict to these suites")
    ap.add_argument("--out", type=Path, default=Path("reports"))
    args = ap.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    worst = "pass"
    for path in args.config or DEFAULT_CONFIGS:
        cfg = SuiteConfig.load(path)
        if args.suites:
            cfg = SuiteConfig.from_dict({**cfg.to_dict(), "suites": args.suites})
        t0 = time.perf_counter()
        report = run_suite(cfg)
        dt = time.perf_counter() - t0
        for fmt, ext in (("json", "json"), ("csv", "csv"), ("markdown", "md")):
            emit_report(report, fmt, args.out / f"{path.stem}.{ext}")
        print(f"{path.stem}: {report.verdict} ({dt:.0f} s)")
        for key, s in report.suites.items():
            print(f"  {key:32s} {s['verdict']}")
        worst = max(worst, report.verdict, key=RANK.index)
    return EXIT[worst]


if __name__ == "__main__":
    sys.exit(main())
