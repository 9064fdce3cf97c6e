"""Measure truncation bias: rerun a suite on growing boxes at a fixed cell size.

Operators only see cubes inside the box, so a ratio that drifts as the box
grows is picking up truncation rather than the inequality itself.

    python3 scripts/box_growth_study.py --suite fractional_maximal --half-widths 2 4 8
"""

import argparse
import sys
from pathlib import Path

from gorlicz.harness import SuiteConfig, run_suite
from gorlicz.harness.suites import spread

HERE = Path(__file__).resolve().parent


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=HERE / "configs" / "double_phase.json")
    ap.add_argument("--suite", default="fractional_maximal")
    ap.add_argument("--half-widths", type=float, nargs="+", default=[2.0, 4.0, 8.0])
    ap.add_argument("--cells-per-unit", type=int, default=64)
    args = ap.parse_args(argv)

    base = SuiteConfig.load(args.config).to_dict()
    finest = {}
    for L in args.half_widths:
        N = int(round(2 * L * args.cells_per_unit))
        raw = {**base, "suites": [args.suite], "box": [[-L, L]] * base["n"],
               "resolutions": [N // 4, N // 2, N]}
        for c in run_suite(SuiteConfig.from_dict(raw)).by_suite(args.suite):
            if c.kind == "trend" and c.values:
                finest.setdefault(c.case, []).append(c.values[-1])
    print(f"{'case':40s} box drift | " + "  ".join(f"L={L:g}" for L in args.half_widths))
    for case, vals in finest.items():
        print(f"{case:40s} {spread(vals):9.3f} | " + "  ".join(f"{v:.4g}" for v in vals))
    return 0


if __name__ == "__main__":
    sys.exit(main())
