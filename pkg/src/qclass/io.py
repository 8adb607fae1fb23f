"""Serialization helpers: stable JSON text, CSV rasters, state file parsing."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math

import numpy as np

from .xstate import XState

JSON_DIGITS = 17
SUMMARY_DIGITS = 9


def _plain(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _fmt_float(x: float, digits: int) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, f".{digits}g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _emit(obj, digits: int, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, digits, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, digits, indent, level) for v in obj) + "]"
        items = [pad + _emit(v, digits, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, float):
        return _fmt_float(obj, digits)
    return json.dumps(obj)


def dumps(obj, digits: int = JSON_DIGITS, indent: int = 2) -> str:
    """JSON text with every float at ``digits`` significant digits.

    Key order is preserved, so equal inputs always give identical bytes.
    Non-finite floats become ``null``.
    """
    return _emit(_plain(obj), digits, indent, 0)


def config_hash(config: dict) -> str:
    text = json.dumps(_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def csv_text(header: list[str], rows: list[list], digits: int = JSON_DIGITS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(
            [_fmt_float(v, digits) if isinstance(v, float) else str(v).lower() if isinstance(v, bool) else v for v in row]
        )
    return buf.getvalue()


def _entry(x, where: str) -> complex:
    if isinstance(x, bool):
        raise TypeError(f"{where}: expected a number or [re, im], got a boolean")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    raise TypeError(f"{where}: expected a number or [re, im]")


def matrix_from_json(obj) -> np.ndarray:
    """Dense matrix from rows of numbers or ``[re, im]`` pairs."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise TypeError("field 'matrix' must be a list of rows")
    n = len(obj)
    if any(len(r) != n for r in obj):
        raise TypeError(f"field 'matrix' must be square; row lengths {[len(r) for r in obj]}")
    return np.array([[_entry(x, f"matrix[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(obj)])


def parse_state(obj):
    """An :class:`XState` or a dense matrix from decoded state JSON.

    A top-level ``"matrix"`` key selects the dense form; anything else is read
    with the X-state schema.
    """
    if not isinstance(obj, dict):
        raise TypeError("state JSON must be an object")
    if "matrix" in obj:
        return matrix_from_json(obj["matrix"])
    return XState.from_json(obj)


def matrix_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]
