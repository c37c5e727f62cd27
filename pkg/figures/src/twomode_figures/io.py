"""Readers for the twomode CLI file contract.

Every input must begin with '# '-prefixed header lines (the producing
run's configuration); data follow as plain CSV, or a JSON document for
the critical-points file.  Missing headers or columns fail fast.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "read_table", "read_points", "header_value"]


class SchemaError(ValueError):
    """Input file does not follow the twomode output contract."""


def _split(path: Path) -> tuple[list[str], list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#") and l.strip()]
    if not header:
        raise SchemaError(f"{path}: missing configuration header ('#' lines)")
    return header, body


def header_value(header: list[str], key: str) -> str | None:
    """Last 'key = value' occurrence in the comment header, if any."""
    found = None
    for line in header:
        stripped = line.lstrip("#").strip()
        if stripped.startswith(f"{key} =") or stripped.startswith(f"{key}="):
            found = stripped.split("=", 1)[1].strip()
    return found


def read_table(path, required: tuple[str, ...]):
    """CSV with the header contract; returns (header_lines, columns dict).

    Numeric columns come back as float arrays (empty fields as NaN);
    non-numeric ones as object arrays of strings.
    """
    header, body = _split(Path(path))
    if not body:
        raise SchemaError(f"{path}: no data rows")
    names = body[0].split(",")
    missing = [c for c in required if c not in names]
    if missing:
        raise SchemaError(f"{path}: missing required columns {missing}")
    rows = [line.split(",") for line in body[1:]]
    if any(len(r) != len(names) for r in rows):
        raise SchemaError(f"{path}: ragged rows")
    cols: dict[str, np.ndarray] = {}
    for j, name in enumerate(names):
        raw = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(v) if v != "" else np.nan for v in raw])
        except ValueError:
            cols[name] = np.array(raw, dtype=object)
    return header, cols


def read_points(path):
    """Critical-points JSON (with comment header); returns (header, dict)."""
    header, body = _split(Path(path))
    try:
        doc = json.loads("\n".join(body))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON payload: {exc}") from exc
    for key in ("ep", "r_line", "transition"):
        if key not in doc:
            raise SchemaError(f"{path}: missing key {key!r}")
    return header, doc
