"""Tabular and JSON output. Floats are written with 17 significant digits so
doubles survive a round trip."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if value is None:
        return ""
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def format_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def format_json(rows: Iterable[dict], columns: Sequence[str]) -> str:
    doc = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def format_rows(rows: Iterable[dict], columns: Sequence[str], fmt: str) -> str:
    return format_json(rows, columns) if fmt == "json" else format_csv(rows, columns)


def _sanitize(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return _json_value(value)


def dumps_report(report: dict) -> str:
    return json.dumps(_sanitize(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def emit(text: str, out: str | None) -> None:
    """Write to ``out`` or to stdout."""
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
