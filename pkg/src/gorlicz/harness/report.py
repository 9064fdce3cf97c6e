"""Serialise a :class:`SuiteReport` as JSON, flat CSV or markdown."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .suites import SuiteReport

FORMATS = ("json", "csv", "markdown")
CSV_HEADER = ("path", "type", "value")


class ReportError(OSError):
    """The report could not be written or read."""


# --------------------------------------------------------------------------
# flat CSV: one row per leaf, keyed by a JSON-pointer style path


def _escape(key: str) -> str:
    return str(key).replace("~", "~0").replace("/", "~1")


def _unescape(seg: str) -> str:
    return seg.replace("~1", "/").replace("~0", "~")


def flatten(obj, prefix: str = "") -> list:
    """Rows ``(path, type, value)``; containers get a row of their own so
    empty ones survive, and floats are written with ``repr``."""
    rows = []
    if isinstance(obj, dict):
        rows.append((prefix, "dict", ""))
        for k, v in obj.items():
            rows.extend(flatten(v, f"{prefix}/{_escape(k)}"))
    elif isinstance(obj, (list, tuple)):
        rows.append((prefix, "list", str(len(obj))))
        for i, v in enumerate(obj):
            rows.extend(flatten(v, f"{prefix}/{i}"))
    elif obj is None:
        rows.append((prefix, "null", ""))
    elif isinstance(obj, bool):
        rows.append((prefix, "bool", "true" if obj else "false"))
    elif isinstance(obj, int):
        rows.append((prefix, "int", str(obj)))
    elif isinstance(obj, float):
        rows.append((prefix, "float", repr(obj)))
    else:
        rows.append((prefix, "str", str(obj)))
    return rows


def _leaf(kind: str, text: str):
    if kind == "dict":
        return {}
    if kind == "list":
        return [None] * int(text)
    if kind == "null":
        return None
    if kind == "bool":
        return text == "true"
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "str":
        return text
    raise ReportError(f"unknown CSV value type {kind!r}")


def unflatten(rows) -> object:
    root = None
    for path, kind, text in rows:
        value = _leaf(kind, text)
        if path == "":
            root = value
            continue
        segs = [_unescape(s) for s in path.split("/")[1:]]
        node = root
        for s in segs[:-1]:
            node = node[int(s)] if isinstance(node, list) else node[s]
        last = segs[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    return root


def to_csv(report: SuiteReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(flatten(report.to_dict()))
    return buf.getvalue()


def from_csv(text: str) -> SuiteReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ReportError("not a flat report CSV")
    return SuiteReport.from_dict(unflatten(rows[1:]))


# --------------------------------------------------------------------------
# markdown


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            return str(v)
        return f"{v:.4g}"
    return str(v)


def render_markdown(report: SuiteReport) -> str:
    lines = ["# Suite report", ""]
    prov = report.provenance
    lines += [f"- verdict: **{report.verdict}**",
              f"- config hash: `{prov.get('config_hash', '')}`",
              f"- seed: {prov.get('seed', '')}",
              f"- cases: {len(report.cases)}"]
    for k, v in report.constants.items():
        lines.append(f"- {k}: {_fmt(v)}")
    if report.uncovered:
        lines.append(f"- uncovered statements: {', '.join(report.uncovered)}")
    lines.append("")
    for key, summary in report.suites.items():
        lines += [f"## {key}", "", f"verdict: **{summary['verdict']}**", ""]
        refs = summary.get("references", [])
        if refs:
            lines.append("Statements: " + "; ".join(refs))
            lines.append("")
        if summary.get("aborted"):
            lines += [f"Aborted: {summary.get('diagnostics', '')}", ""]
            continue
        lines += ["| case | kind | verdict | trend | values |", "|---|---|---|---|---|"]
        for c in report.by_suite(key):
            vals = ", ".join(_fmt(v) for v in c.values[:6])
            lines.append(f"| {c.case} | {c.kind} | {c.verdict} | {_fmt(c.trend)} | {vals} |")
        lines.append("")
    if report.timing:
        lines += ["## timing", "", "| suite | seconds |", "|---|---|"]
        lines += [f"| {k} | {v:.2f} |" for k, v in report.timing.items()]
        lines.append("")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# files


def render(report: SuiteReport, fmt: str) -> str:
    if fmt == "json":
        return report.to_json(indent=1)
    if fmt == "csv":
        return to_csv(report)
    if fmt in ("markdown", "md"):
        return render_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}; known: {', '.join(FORMATS)}")


def emit_report(report: SuiteReport, fmt: str, path) -> Path:
    """Write ``report`` to ``path`` in ``fmt`` (json, csv or markdown)."""
    text = render(report, fmt)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ReportError(f"cannot write report to {path}: {exc}") from exc
    return path


def load_report(path) -> SuiteReport:
    """Read a JSON or flat-CSV report."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ReportError(f"cannot read report {path}: {exc}") from exc
    if path.suffix.lower() == ".csv":
        return from_csv(text)
    return SuiteReport.from_dict(json.loads(text))
