"""Deterministic JSON / CSV serialisation of run reports.

Floats are rounded to 12 significant digits and keys are sorted, so an
identical scenario always serialises to identical bytes. Any NaN or
infinity aborts serialisation with ``NonFiniteOutput``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Union

from .errors import IoError, NonFiniteOutput
from .runner import RunReport

SIG_DIGITS = 12


def _round(x: float) -> float:
    y = float(format(x, f".{SIG_DIGITS}g"))
    return 0.0 if y == 0 else y


def normalise(obj: Any, path: str = "") -> Any:
    """Round floats, convert tuples to lists, and reject non-finite values."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise NonFiniteOutput(path or "<root>", obj)
        return _round(obj)
    if isinstance(obj, dict):
        return {str(k): normalise(v, f"{path}.{k}" if path else str(k)) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalise(v, f"{path}[{i}]") for i, v in enumerate(obj)]
    if hasattr(obj, "item"):  # numpy scalar
        return normalise(obj.item(), path)
    raise TypeError(f"{path}: cannot serialise {type(obj).__name__}")


def to_json(report: RunReport) -> str:
    data = normalise(report.to_dict())
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f".{SIG_DIGITS}g")
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def flatten(results: dict, prefix: str = "") -> list[tuple[str, Any]]:
    """Dotted-path metric rows, sorted by path. Lists stay single cells."""
    rows = []
    for key in sorted(results):
        value = results[key]
        name = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            rows.extend(flatten(value, name))
        else:
            rows.append((name, value))
    return rows


def to_csv(report: RunReport) -> str:
    """Long-format table: one row per metric, and per grid point for sweeps."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.sweep is None:
        writer.writerow(["metric", "value"])
        for name, value in flatten(normalise(report.results)):
            writer.writerow([name, _cell(value)])
    else:
        param = report.sweep["param"]
        writer.writerow(["index", "param", "param_value", "metric", "value"])
        for pt in normalise(report.points):
            for name, value in flatten(pt["results"]):
                writer.writerow([pt["index"], param, _cell(pt["value"]), name, _cell(value)])
    return buf.getvalue()


def convergence_csv(table) -> str:
    """Per-run Monte Carlo rows: seed, m_users, tau, a_hat, a_true, abs_error, ci_halfwidth."""
    from .montecarlo import CSV_COLUMNS

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in normalise(list(table.rows)):
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_text(text: str, dest: Union[str, Path, None]) -> None:
    if dest is None or str(dest) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {dest}: {exc}") from exc


def emit(report: RunReport, format: str = "json", dest: Union[str, Path, None] = None) -> None:
    """Serialise ``report`` as ``json`` or ``csv`` to ``dest`` (stdout when None or "-")."""
    if format == "json":
        text = to_json(report)
    elif format == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {format!r}")
    write_text(text, dest)
