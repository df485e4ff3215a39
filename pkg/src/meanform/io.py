"""MatrixDocument JSON and CSV helpers.

A matrix document is ``{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}``
in row-major order. :func:`emit_matrix_document` writes the canonical form,
so ``emit(parse(doc)) == doc`` for any canonical file.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InputError

DOCUMENT_KEYS = {"rows", "cols", "data"}


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{where}: expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise InputError(f"{where}: non-finite number")
    return float(x)


def document_to_matrix(doc) -> np.ndarray:
    if not isinstance(doc, dict) or set(doc) != DOCUMENT_KEYS:
        raise InputError('matrix document must have exactly the keys "rows", "cols", "data"')
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    for key, v in (("rows", rows), ("cols", cols)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputError(f"{key} must be a positive integer")
    if not isinstance(data, list) or len(data) != rows:
        raise InputError(f"data must be a list of {rows} rows")
    out = np.empty((rows, cols), dtype=np.complex128)
    for r, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"row {r} must have {cols} entries")
        for c, pair in enumerate(row):
            if not isinstance(pair, list) or len(pair) != 2:
                raise InputError(f"entry ({r},{c}) must be a [re, im] pair")
            out[r, c] = complex(_number(pair[0], f"({r},{c}).re"), _number(pair[1], f"({r},{c}).im"))
    return out


def matrix_to_document(a) -> dict:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise InputError("matrix document needs a 2-D array")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix contains non-finite entries")
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def parse_matrix_document(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg} at offset {exc.pos}") from None
    return document_to_matrix(doc)


def emit_matrix_document(a) -> str:
    """Canonical text: one row per line, shortest round-trip float repr."""
    doc = matrix_to_document(a)
    rows = ",\n    ".join(
        "[" + ", ".join(f"[{_fmt_json(re)}, {_fmt_json(im)}]" for re, im in row) + "]"
        for row in doc["data"]
    )
    return f'{{\n  "rows": {doc["rows"]},\n  "cols": {doc["cols"]},\n  "data": [\n    {rows}\n  ]\n}}\n'


def _fmt_json(x: float) -> str:
    return json.dumps(x)


def read_matrix(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix_document(text)


def fmt_float(x: float) -> str:
    """17 significant digits, '.' decimal point, no grouping."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def csv_lines(header, rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(out) + "\n"
