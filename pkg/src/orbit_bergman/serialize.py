"""Bit-stable result serialization.

Floats print with 17 significant digits (which round-trips doubles exactly),
dictionary keys are emitted in sorted order, and complex numbers become
[re, im] pairs, so identical payloads serialize to identical bytes.  The
JSON writer is hand-rolled to keep the float format under control.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _normalize(obj):
    """Reduce to None/bool/int/float/str/list/dict."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.complexfloating,)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [_normalize(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if hasattr(obj, "to_json_dict"):
        return _normalize(obj.to_json_dict())
    if dataclasses.is_dataclass(obj):
        return {
            f.name: _normalize(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(obj, parts: list, indent: int):
    pad = "  " * indent
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format_float(obj))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, list):
        if not obj:
            parts.append("[]")
            return
        parts.append("[")
        for i, v in enumerate(obj):
            parts.append("\n" + pad + "  ")
            _emit(v, parts, indent + 1)
            if i < len(obj) - 1:
                parts.append(",")
        parts.append("\n" + pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            parts.append("{}")
            return
        parts.append("{")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            parts.append("\n" + pad + "  " + json.dumps(k) + ": ")
            _emit(obj[k], parts, indent + 1)
            if i < len(keys) - 1:
                parts.append(",")
        parts.append("\n" + pad + "}")
    else:  # pragma: no cover - _normalize precedes
        raise TypeError(f"unexpected type {type(obj)!r}")


def to_stable_json(obj) -> str:
    parts: list = []
    _emit(_normalize(obj), parts, 0)
    return "".join(parts) + "\n"


def to_csv_text(header, rows) -> str:
    def cell(v):
        if isinstance(v, bool):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return format_float(float(v))
        if isinstance(v, (complex, np.complexfloating)):
            return f"{format_float(v.real)}+{format_float(v.imag)}i"
        return str(v)

    lines = [",".join(str(h) for h in header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


@dataclass
class ResultRecord:
    """One experiment's outcome: the config that produced it, the payload,
    and any convergence warnings.

    Timings are kept in memory for interactive inspection but stay out of
    the emitted files so that byte-identical runs stay byte-identical.
    """

    config: dict
    version: str
    payload: dict
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    csv_header: list | None = None
    csv_rows: list | None = None

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "payload": self.payload,
            "warnings": list(self.warnings),
        }


def emit_results(record: ResultRecord, path, fmt: str) -> None:
    """Write a record to path as json or csv (bit-stable for fixed inputs)."""
    path = Path(path)
    if fmt == "json":
        path.write_text(to_stable_json(record), encoding="utf-8")
    elif fmt == "csv":
        if record.csv_header is None or record.csv_rows is None:
            raise ValueError(f"command {record.config.get('command')} has no tabular payload")
        config_line = "# config: " + json.dumps(record.config, sort_keys=True)
        body = to_csv_text(record.csv_header, record.csv_rows)
        path.write_text(config_line + "\n" + body, encoding="utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r} (use csv or json)")


def read_json_record(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
