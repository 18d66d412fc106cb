from __future__ import annotations

import csv
import io
import json
import math
from typing import Any, Iterable, Sequence

from photodistill.schemas import RunReport
from photodistill.tomography.decompose import eta_db

SIG_DIGITS = 12

ISOLINE_COLUMNS = ("N", "p_over_pth", "cost_ratio", "valid_linear")
ETA_COLUMNS = ("input", "output", "eta", "loss_db")
BUDGET_COLUMNS = ("quantity", "value", "se", "ci_half_width")


def round_sig(value: Any, digits: int = SIG_DIGITS) -> Any:
    """Round every float in a JSON-like structure to ``digits`` significant digits."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if value == 0.0 or not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_sig(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v, digits) for v in value]
    return value


def to_json(report: RunReport) -> str:
    return json.dumps(round_sig(report.model_dump(mode="json")), indent=2, sort_keys=False) + "\n"


def _csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([round_sig(x) for x in row])
    return buf.getvalue()


def isoline_csv(curve: dict) -> str:
    return _csv(ISOLINE_COLUMNS, ([r[c] for c in ISOLINE_COLUMNS] for r in curve["rows"]))


def eta_csv(eta_map: Sequence[Sequence[float]]) -> str:
    """One row per input/output pair, modes numbered from 1."""
    rows = []
    for i, row in enumerate(eta_map, 1):
        for j, eta in enumerate(row, 1):
            rows.append((i, j, eta, eta_db(eta) if eta > 0 else "inf"))
    return _csv(ETA_COLUMNS, rows)


def budget_csv(table: Sequence[dict]) -> str:
    return _csv(BUDGET_COLUMNS, ([r[c] for c in BUDGET_COLUMNS] for r in table))


def _flatten(prefix: str, value: Any, out: list[tuple[str, Any]]):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, value))


def key_value_csv(results: dict) -> str:
    flat: list[tuple[str, Any]] = []
    _flatten("", results, flat)
    return _csv(("key", "value"), ((k, json.dumps(v) if isinstance(v, list) else v) for k, v in flat))


def to_csv(report: RunReport) -> str:
    """The natural table of each command, falling back to key/value rows."""
    r = report.results
    if report.command == "resources" and "isolines" in r:
        return isoline_csv(r["isolines"])
    if report.command == "characterize" and "eta_map" in r:
        return eta_csv(r["eta_map"])
    if report.command == "extract" and "table" in r:
        return budget_csv(r["table"])
    if report.command == "simulate" and r.get("error_scan"):
        rows = r["error_scan"]
        return _csv(tuple(rows[0].keys()), (tuple(x.values()) for x in rows))
    return key_value_csv(r)


def to_report_md(report: RunReport) -> str:
    lines: list[str] = []
    lines.append(f"# Run report: {report.command}\n")
    lines.append(f"Tool version `{report.tool_version}`.\n")

    # ---------------- Results ----------------
    lines.append("## Results\n")
    scalars = {k: v for k, v in report.results.items() if not isinstance(v, (dict, list))}
    nested = {k: v for k, v in report.results.items() if isinstance(v, (dict, list))}
    if scalars:
        for k, v in scalars.items():
            lines.append(f"- **{k}**: {round_sig(v, 6) if v is not None else 'Not available'}")
        lines.append("")
    if "table" in nested:
        lines.append("| Quantity | Value | SE | 95% CI ± |")
        lines.append("|---|---|---|---|")
        for row in nested.pop("table"):
            lines.append(
                f"| {row['quantity']} | {row['value']:.4f} | {row['se']:.4f} | {row['ci_half_width']:.4f} |"
            )
        lines.append("")
    for k, v in nested.items():
        lines.append(f"### {k}\n")
        lines.append("```json")
        lines.append(json.dumps(round_sig(v, 6), indent=2))
        lines.append("```\n")
    if not report.results:
        lines.append("No results were produced.\n")

    # ---------------- Warnings ----------------
    lines.append("## Warnings\n")
    if report.warnings:
        for w in report.warnings:
            lines.append(f"- {w}")
    else:
        lines.append("- None")
    lines.append("")

    # ---------------- Transparency ----------------
    lines.append("## Inputs & Parameters\n")
    if report.input_digests:
        for name, digest in report.input_digests.items():
            lines.append(f"- `{name}`: `{digest}`")
    else:
        lines.append("- Input digests: Not available (parameters posted inline)")
    lines.append("\n```json")
    lines.append(json.dumps(report.parameters, indent=2))
    lines.append("```")
    return "\n".join(lines).strip() + "\n"
