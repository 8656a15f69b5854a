"""
Shared JSON matrix format.

A matrix document is ``{"n": n, "matrix": rows}`` where ``rows`` holds 2n
rows of 2n entries, each entry a ``[re, im]`` pair.  Floats are written with
17 significant digits so that a write/read cycle is exact.
"""

from __future__ import annotations

import json
import math

import numpy as np


class FormatError(ValueError):
    pass


def _reject_constant(name):
    raise FormatError(f"non-finite value {name} is not allowed")


def loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc


def matrix_to_doc(M, **extra) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    doc = {"n": M.shape[0] // 2,
           "matrix": [[[z.real, z.imag] for z in row] for row in M]}
    doc.update(extra)
    return doc


def doc_to_matrix(doc) -> np.ndarray:
    """Parse a matrix document, rejecting ragged rows and non-finite values."""
    if not isinstance(doc, dict) or "matrix" not in doc or "n" not in doc:
        raise FormatError('matrix document needs "n" and "matrix" keys')
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FormatError(f'"n" must be a positive integer, got {n!r}')
    rows = doc["matrix"]
    if not isinstance(rows, list) or len(rows) != 2 * n:
        raise FormatError(f"expected {2 * n} rows")
    out = np.empty((2 * n, 2 * n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 2 * n:
            raise FormatError(f"row {i} must have {2 * n} entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
                raise FormatError(f"entry ({i}, {j}) must be a [re, im] pair of numbers")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise FormatError(f"entry ({i}, {j}) is not finite")
            out[i, j] = complex(re, im)
    return out


def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(None)
        if x == 0.0:
            return "0.0"
        text = format(x, ".17g")
        return text if ("." in text or "e" in text) else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) and obj.ndim == 2:
            return _encode(matrix_to_doc(obj)["matrix"])
        return _encode(obj.tolist())
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag])
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """Serialize with 17 significant digits per float; deterministic key order."""
    return _encode(obj) + "\n"
