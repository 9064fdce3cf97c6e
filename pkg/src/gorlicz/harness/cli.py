"""Command-line driver.

Exit codes: 0 when everything passes, 1 on any fail (or an error), 2 when
something is inconclusive and nothing failed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from ..conditions import check_condition
from ..grid import GridError, cube_family, load_function, save_function
from ..norms import NumericalError, luxemburg_norm
from ..operators import (
    CapExceeded,
    fm_commutator,
    fractional_maximal,
    hl_maximal,
    maximal_commutator,
    riesz_abs_commutator,
    riesz_commutator,
    riesz_potential,
    sharp_maximal,
)
from ..phi import ArgumentError, ConstructionError, DomainError, PreconditionError, load_phi
from .report import ReportError, emit_report, load_report, render
from .suites import ConfigError, SuiteConfig, run_suite

EXIT = {"pass": 0, "fail": 1, "inconclusive": 2}
DEFAULT_CONDITIONS = ("A0", "A1", "A2")
NEEDS_B = {"Mb", "commutator", "Ib_commutator", "Ib"}


def overall(verdicts) -> str:
    verdicts = list(verdicts)
    if "fail" in verdicts:
        return "fail"
    if "inconclusive" in verdicts:
        return "inconclusive"
    return "pass"


def _cmd_phi_check(args) -> int:
    phi = load_phi(args.spec)
    reports = [check_condition(phi, c) for c in (args.cond or DEFAULT_CONDITIONS)]
    print(json.dumps([r.to_dict() for r in reports], indent=1))
    return EXIT[overall(r.verdict for r in reports)]


def _cmd_norm(args) -> int:
    res = luxemburg_norm(load_phi(args.phi), load_function(args.f), tol=args.tol)
    print(json.dumps(res.to_dict()))
    return 0


def apply_operator(name: str, f, b=None, alpha: float = 0.0, family: str = "dyadic"):
    """Run the operator registered as ``name`` and return its output."""
    if name in NEEDS_B and b is None:
        raise ArgumentError(f"operator {name!r} needs a multiplier b")
    fam = cube_family(f.grid, family)
    if name == "M":
        return hl_maximal(f, fam)
    if name == "Mc":
        return hl_maximal(f, fam, centered=True)
    if name == "Malpha":
        return fractional_maximal(f, alpha, fam)
    if name == "sharp":
        return sharp_maximal(f, fam)
    if name == "Mb":
        return maximal_commutator(b, f, alpha, fam)
    if name == "commutator":
        return fm_commutator(b, f, alpha, fam)
    if name == "I":
        return riesz_potential(f, alpha)
    if name == "Ib_commutator":
        return riesz_commutator(b, f, alpha)
    if name == "Ib":
        return riesz_abs_commutator(b, f, alpha)
    raise ArgumentError(f"unknown operator {name!r}")


def _cmd_op(args) -> int:
    f = load_function(args.f)
    b = load_function(args.b) if args.b else None
    out = apply_operator(args.name, f, b, args.alpha, args.family)
    if args.out:
        save_function(out.result, args.out)
    v = out.values
    print(json.dumps({"operator": args.name, "alpha": args.alpha, "family": args.family,
                      "max": float(np.max(v)), "min": float(np.min(v)),
                      "argmax_cube": out.argmax_cube, "out": args.out}))
    return 0


def _cmd_suite_run(args) -> int:
    config = SuiteConfig.load(args.config)
    report = run_suite(config)
    fmt = args.format or ("csv" if args.out.endswith(".csv") else "markdown" if args.out.endswith(".md") else "json")
    emit_report(report, fmt, args.out)
    for key, s in report.suites.items():
        print(f"{key:32s} {s['verdict']}", file=sys.stderr)
    print(f"{'overall':32s} {report.verdict}", file=sys.stderr)
    return EXIT[report.verdict]


def _cmd_report_render(args) -> int:
    report = load_report(args.report)
    fmt = "markdown" if args.format == "md" else args.format
    if args.out:
        emit_report(report, fmt, args.out)
    else:
        sys.stdout.write(render(report, fmt))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gorlicz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    phi = sub.add_parser("phi", help="Phi-function utilities").add_subparsers(dest="action", required=True)
    chk = phi.add_parser("check", help="run structural condition checkers")
    chk.add_argument("spec")
    chk.add_argument("--cond", action="append", help="A0, A1, A2, aInc:p or aDec:q (repeatable)")
    chk.set_defaults(func=_cmd_phi_check)

    nrm = sub.add_parser("norm", help="Luxemburg norm of a grid function")
    nrm.add_argument("phi")
    nrm.add_argument("f")
    nrm.add_argument("--tol", type=float, default=1e-10)
    nrm.set_defaults(func=_cmd_norm)

    op = sub.add_parser("op", help="apply an operator to a grid function")
    op.add_argument("name", choices=["M", "Mc", "Malpha", "sharp", "Mb", "commutator", "I", "Ib_commutator", "Ib"])
    op.add_argument("f")
    op.add_argument("b", nargs="?")
    op.add_argument("--alpha", type=float, default=0.0)
    op.add_argument("--family", default="dyadic", choices=["dyadic", "sliding", "standard", "all"])
    op.add_argument("--out", help="write the result (.bin or .csv)")
    op.set_defaults(func=_cmd_op)

    suite = sub.add_parser("suite", help="inequality suites").add_subparsers(dest="action", required=True)
    run = suite.add_parser("run", help="run the suites of a config")
    run.add_argument("config")
    run.add_argument("--out", required=True)
    run.add_argument("--format", choices=["json", "csv", "markdown"])
    run.set_defaults(func=_cmd_suite_run)

    rep = sub.add_parser("report", help="report utilities").add_subparsers(dest="action", required=True)
    ren = rep.add_parser("render", help="render a stored report")
    ren.add_argument("report")
    ren.add_argument("--format", default="md", choices=["md", "markdown", "json", "csv"])
    ren.add_argument("--out")
    ren.set_defaults(func=_cmd_report_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ArgumentError, ConfigError, ConstructionError, DomainError, PreconditionError, GridError,
            NumericalError, CapExceeded, ReportError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"gorlicz: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
