"""Test banks, inequality suites, reports and the command-line driver."""

from .report import emit_report, load_report, render_markdown
from .suites import COVERAGE, SUITES, CaseResult, SuiteConfig, SuiteReport, run_suite, suite_coverage
from .testbank import builtin_testbank

__all__ = ["COVERAGE", "SUITES", "CaseResult", "SuiteConfig", "SuiteReport", "builtin_testbank",
           "emit_report", "load_report", "render_markdown", "run_suite", "suite_coverage"]
