"""Text format for dense complex matrices.

A UTF-8 JSON object::

    {"dim": 2, "entries": [[1, 0], [0, 0], [0, 0], [-1, 0]]}

``entries`` lists the N^2 matrix elements row-major, each as a ``[re, im]``
pair of decimal numbers.  Output numbers use 17 significant digits.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


class MatrixFileError(ValueError):
    """The document does not follow the matrix grammar."""


def fmt(x: float) -> str:
    """Round-trip-safe decimal with 17 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot emit non-finite value {x!r}")
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return format(x, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written by :func:`fmt`."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_to_obj(matrix: np.ndarray) -> dict:
    m = np.asarray(matrix, dtype=np.complex128)
    return {"dim": m.shape[0], "entries": [[z.real, z.imag] for z in m.reshape(-1)]}


def parse_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise MatrixFileError("expected an object with fields 'dim' and 'entries'")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MatrixFileError(f"'dim' must be a positive integer, got {dim!r}")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != dim * dim:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise MatrixFileError(f"'entries' must be a list of {dim * dim} [re, im] pairs, got {got}")
    values = np.empty(dim * dim, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise MatrixFileError(f"entry {k} is not a [re, im] pair of numbers: {pair!r}")
        if not all(math.isfinite(x) for x in pair):
            raise MatrixFileError(f"entry {k} is not finite: {pair!r}")
        values[k] = complex(pair[0], pair[1])
    return values.reshape(dim, dim)


def loads_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"not a valid document: {exc}") from None
    return parse_matrix(obj)


def read_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from None
    return loads_matrix(text)


def dumps_matrix(matrix: np.ndarray) -> str:
    return to_json(matrix_to_obj(matrix)) + "\n"
