"""Print how each trend ratio moves as the grid is refined.

A ratio that settles is evidence for the inequality; one that keeps growing
is evidence against it.  Resolutions default to the config's own ladder.

    python3 scripts/refinement_study.py --suite maximal_commutator --resolutions 256 512 1024 2048
"""

import argparse
import sys
from pathlib import Path

from gorlicz.harness import SuiteConfig, run_suite

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=HERE / "configs" / "double_phase.json")
    ap.add_argument("--suite", default="maximal_commutator")
    ap.add_argument("--resolutions", type=int, nargs="+")
    args = ap.parse_args(argv)

    raw = {**SuiteConfig.load(args.config).to_dict(), "suites": [args.suite]}
    if args.resolutions:
        raw["resolutions"] = args.resolutions
    report = run_suite(SuiteConfig.from_dict(raw))
    for c in report.by_suite(args.suite):
        if c.kind not in ("trend", "shape_case"):
            continue
        vals = "  ".join(f"{v:10.4g}" for v in c.values)
        print(f"{c.case:48s} {c.verdict:12s} spread {c.trend:6.3f} | {vals}")
    return 0 if report.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
