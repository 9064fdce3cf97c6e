import json

import numpy as np
import pytest

from gorlicz.grid import make_grid, save_function
from gorlicz.harness import (
    COVERAGE,
    SUITES,
    CaseResult,
    SuiteConfig,
    SuiteReport,
    builtin_testbank,
    emit_report,
    load_report,
    render_markdown,
    run_suite,
    suite_coverage,
)
from gorlicz.harness.cli import main
from gorlicz.harness.report import ReportError, from_csv, to_csv
from gorlicz.harness.suites import ConfigError, classify_trend, spread, trend_case
from gorlicz.phi import ArgumentError, Coefficient, Power, power

SMALL = {"resolutions": [64, 128, 256]}
BAD_PHI = Power(2.0, 1.0, Coefficient("abs", {})).to_dict()


@pytest.fixture(scope="module")
def norms_report():
    return run_suite({**SMALL, "suites": ["norms", "fractional_maximal"]})


# test banks


def test_identity_bank_has_every_dyadic_level():
    cases = builtin_testbank("identities")
    levels_1d = sorted(c.params["level"] for c in cases if c.params["n"] == 1)
    levels_2d = sorted(c.params["level"] for c in cases if c.params["n"] == 2)
    assert levels_1d == list(range(13)) and levels_2d == list(range(9))


def test_random_bank_regenerates_bit_identically():
    a = builtin_testbank("random", seed=5, count=10)
    b = builtin_testbank("random", seed=5, count=10)
    assert [c.to_dict() for c in a] == [c.to_dict() for c in b]
    for x, y in zip(a, b):
        assert np.array_equal(x.function().values, y.function().values)
        assert np.array_equal(x.coefficient().values, y.coefficient().values)


def test_random_bank_seed_matters():
    a = builtin_testbank("random", seed=1, count=3)[0].function().values
    b = builtin_testbank("random", seed=2, count=3)[0].function().values
    assert a.shape != b.shape or not np.array_equal(a, b)


def test_random_bank_values_are_multiples_of_an_eighth():
    for c in builtin_testbank("random", count=12):
        v = c.function().values
        assert np.array_equal(v * 8, np.round(v * 8))


@pytest.mark.parametrize("name", ["", "nonsense"])
def test_unknown_bank_rejected(name):
    with pytest.raises(ArgumentError):
        builtin_testbank(name)


def test_f_bank_shapes():
    g = make_grid((-2.0, 2.0), 64)
    names = {c.name: c.function(g) for c in builtin_testbank("f")}
    assert set(names) == {"gaussian", "cube", "cusp", "oscillatory"}
    assert names["cube"].values.max() == 1.0


def test_phi_bank_specs_load():
    for c in builtin_testbank("phi"):
        assert c.phi().evaluate(0.0, 0.0) == 0.0


# configuration


def test_default_config_is_valid():
    cfg = SuiteConfig()
    assert abs(cfg.alpha / cfg.n - (1 / cfg.p - 1 / cfg.q)) <= 1e-12
    assert cfg.selected == list(SUITES)


@pytest.mark.parametrize("bad", [
    {"q": 3.0},                       # breaks alpha/n = 1/p - 1/q
    {"r": 0.05},                      # r <= alpha/n
    {"r": 0.6},                       # r > 1/p
    {"suites": ["nonsense"]},
    {"tolerances": {"nonsense": 1.0}},
    {"n": 3},
    {"resolutions": [2]},
])
def test_invalid_config_rejected(bad):
    with pytest.raises(ConfigError):
        SuiteConfig(**bad)


def test_unknown_config_key_rejected():
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"colour": "blue"})


def test_config_hash_tracks_content():
    assert SuiteConfig().config_hash() == SuiteConfig().config_hash()
    assert SuiteConfig().config_hash() != SuiteConfig(seed=1).config_hash()


def test_config_file_round_trip(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(SuiteConfig(seed=3).to_dict()))
    assert SuiteConfig.load(p) == SuiteConfig(seed=3)


# verdict helpers


def test_spread_and_shapes():
    assert spread([1.0, 1.1, 1.2]) == pytest.approx(0.2)
    assert spread([1.0, np.inf]) == np.inf
    assert classify_trend([1.0, 1.1, 1.2], 0.25) == "bounded"
    assert classify_trend([1.0, 2.0, 4.0], 0.25) == "increasing"
    assert classify_trend([1.0, 2.0, 1.5], 0.25) == "unresolved"


def test_trend_needs_three_levels():
    assert trend_case("s", "c", [1.0, 1.0], [1, 2], 0.25).verdict == "inconclusive"
    assert trend_case("s", "c", [1.0, 1.0, 1.1], [1, 2, 4], 0.25).verdict == "pass"


def test_case_result_rejects_unknown_verdict():
    with pytest.raises(ValueError):
        CaseResult("s", "c", "exact", "maybe", 0.0)


# runs


def test_run_passes_and_records_constants(norms_report):
    assert norms_report.verdict == "pass"
    assert norms_report.provenance["config_hash"] == SuiteConfig(**SMALL, suites=["norms", "fractional_maximal"]).config_hash()
    assert "C_M" in norms_report.constants and "holder_ratio_max" in norms_report.constants
    assert all(c.verdict in ("pass", "fail", "inconclusive") and np.isfinite(c.trend) for c in norms_report.cases)


def test_run_is_deterministic(norms_report):
    again = run_suite({**SMALL, "suites": ["norms", "fractional_maximal"]})
    assert again.to_json(timing=False) == norms_report.to_json(timing=False)


def test_failing_phi_aborts_only_affected_suites():
    rep = run_suite({**SMALL, "phi": BAD_PHI, "suites": ["norms", "fractional_maximal"]})
    assert rep.suites["norms"]["verdict"] == "pass"
    fm = rep.suites["fractional_maximal"]
    assert fm["aborted"] and fm["verdict"] == "inconclusive" and "A0" in fm["diagnostics"]
    assert rep.verdict == "inconclusive"


def test_power_law_sanity_config():
    rep = run_suite({**SMALL, "phi": power(2.0).to_dict(), "r": 0.5,
                     "suites": ["fractional_maximal", "riesz"]})
    assert rep.verdict == "pass"


def test_coverage_has_no_gaps():
    cov = suite_coverage()
    assert set(cov) == set(COVERAGE) and all(cov.values())


def test_uncovered_statement_fails_report():
    rep = SuiteReport(uncovered=["some statement"])
    assert rep.verdict == "fail"


# reports


def test_json_round_trip(tmp_path, norms_report):
    path = emit_report(norms_report, "json", tmp_path / "r.json")
    back = load_report(path)
    assert back.to_dict() == norms_report.to_dict()


def test_csv_round_trip_full_precision(tmp_path, norms_report):
    path = emit_report(norms_report, "csv", tmp_path / "r.csv")
    back = load_report(path)
    assert back.to_dict() == norms_report.to_dict()
    again = from_csv(to_csv(back))
    assert again.to_json() == norms_report.to_json()


def test_csv_rejects_foreign_file():
    with pytest.raises(ReportError):
        from_csv("a,b,c\n")


def test_empty_report_is_valid(tmp_path):
    empty = SuiteReport()
    for fmt, name in (("json", "e.json"), ("csv", "e.csv"), ("markdown", "e.md")):
        path = emit_report(empty, fmt, tmp_path / name)
        assert path.read_text()
    assert load_report(tmp_path / "e.json").cases == []
    assert load_report(tmp_path / "e.csv").cases == []


def test_markdown_has_one_section_per_suite(norms_report):
    md = render_markdown(norms_report)
    for key in norms_report.suites:
        assert md.count(f"\n## {key}\n") == 1
    assert "Statements: " in md and "luxemburg norm" in md


def test_unwritable_path(tmp_path, norms_report):
    with pytest.raises(ReportError):
        emit_report(norms_report, "json", tmp_path / "missing" / "r.json")


def test_unknown_format(norms_report, tmp_path):
    with pytest.raises(ValueError):
        emit_report(norms_report, "xml", tmp_path / "r.xml")


# command line


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_cli_phi_check_exit_codes(tmp_path, capsys):
    spec = _write(tmp_path / "p.json", power(2.0).to_dict())
    assert main(["phi", "check", spec]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["condition"] for r in out] == ["A0", "A1", "A2"]
    assert main(["phi", "check", spec, "--cond", "aInc:3"]) == 1


def test_cli_norm(tmp_path, capsys):
    g = make_grid((-2.0, 2.0), 64)
    f = g.sample(lambda x: np.exp(-x[:, 0] ** 2))
    save_function(f, tmp_path / "f.bin")
    spec = _write(tmp_path / "p.json", power(2.0).to_dict())
    assert main(["norm", spec, str(tmp_path / "f.bin")]) == 0
    val = json.loads(capsys.readouterr().out)["value"]
    assert val == pytest.approx(np.sqrt(np.sum(f.values ** 2) * g.cell_volume), rel=1e-9)


def test_cli_op_writes_result(tmp_path, capsys):
    g = make_grid((0.0, 1.0), 32)
    save_function(g.sample(lambda x: x[:, 0]), tmp_path / "f.bin")
    save_function(g.sample(lambda x: np.sin(x[:, 0])), tmp_path / "b.csv")
    assert main(["op", "Malpha", str(tmp_path / "f.bin"), "--alpha", "0.5", "--out", str(tmp_path / "m.bin")]) == 0
    assert (tmp_path / "m.bin").exists()
    assert main(["op", "Mb", str(tmp_path / "f.bin"), str(tmp_path / "b.csv"), "--family", "sliding"]) == 0
    assert main(["op", "Mb", str(tmp_path / "f.bin")]) == 1  # missing multiplier


def test_cli_suite_and_render(tmp_path, capsys):
    cfg = _write(tmp_path / "c.json", {**SMALL, "suites": ["fractional_maximal"]})
    assert main(["suite", "run", cfg, "--out", str(tmp_path / "r.json")]) == 0
    assert main(["report", "render", str(tmp_path / "r.json"), "--format", "md"]) == 0
    assert "## fractional_maximal" in capsys.readouterr().out
    assert main(["report", "render", str(tmp_path / "r.json"), "--format", "csv", "--out", str(tmp_path / "r.csv")]) == 0
    assert load_report(tmp_path / "r.csv").verdict == "pass"


def test_cli_inconclusive_exit_code(tmp_path):
    cfg = _write(tmp_path / "c.json", {**SMALL, "phi": BAD_PHI, "suites": ["fractional_maximal"]})
    assert main(["suite", "run", cfg, "--out", str(tmp_path / "r.json")]) == 2


def test_cli_bad_config_exit_code(tmp_path):
    cfg = _write(tmp_path / "c.json", {"q": 7.0})
    assert main(["suite", "run", cfg, "--out", str(tmp_path / "r.json")]) == 1
    assert main(["suite", "run", str(tmp_path / "absent.json"), "--out", str(tmp_path / "r.json")]) == 1


def test_cli_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["op", "nonsense", "f.bin"])
    assert exc.value.code == 2
