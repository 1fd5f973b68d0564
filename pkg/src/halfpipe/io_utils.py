"""Flat-file formats: boundary fields (JSON), samples (CSV), summaries (JSON).

CSV is written with 17 significant digits and JSON with stable key order so
identical configurations produce byte-identical artifacts.  Files are written
atomically (write to a sibling temp file, then rename).
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .circle import PIECEWISE_LINEAR, TRIG, BoundaryField, from_fourier


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def load_boundary(path: str) -> BoundaryField:
    """Read a boundary field file; see the package README for the schema."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read boundary file {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("boundary file must contain a JSON object")

    if "fourier" in doc:
        four = doc["fourier"]
        if not isinstance(four, dict) or "a" not in four:
            raise SchemaError('key "fourier" must hold an object with key "a"')
        a = four["a"]
        b = four.get("b", [])
        if not isinstance(a, list) or not isinstance(b, list):
            raise SchemaError('keys "fourier.a" and "fourier.b" must be arrays')
        n = doc.get("n", 512)
        if not isinstance(n, int) or n < 32 or (n & (n - 1)):
            # Power-of-two sampling is a solver precondition, not a schema issue.
            raise ValueError('key "n" must be a power of two >= 32')
        return from_fourier(a, b, n=n, interp=doc.get("interp", TRIG))

    for key in ("n", "interp", "phi"):
        if key not in doc:
            raise SchemaError(f'missing key "{key}" in boundary file')
    n = doc["n"]
    if not isinstance(n, int) or n < 32 or (n & (n - 1)):
        raise ValueError('key "n" must be a power of two >= 32')
    if doc["interp"] not in (TRIG, PIECEWISE_LINEAR):
        raise SchemaError('key "interp" must be "trig" or "pl"')
    phi = doc["phi"]
    if not isinstance(phi, list) or len(phi) != n:
        raise SchemaError('key "phi" must be an array of length n')
    try:
        arr = np.asarray([float(v) for v in phi], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError('key "phi" must hold numbers') from exc
    if not np.all(np.isfinite(arr)):
        raise SchemaError('key "phi" must hold finite numbers')
    return BoundaryField(arr, doc["interp"])


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-halfpipe-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_boundary(path: str, X: BoundaryField) -> None:
    doc = {"n": X.n, "interp": X.interp, "phi": [float(v) for v in X.phi]}
    _atomic_write(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")


def save_csv(path: str, header: list[str], columns: list[np.ndarray]) -> None:
    """Write columns as CSV with 17 significant digits."""
    rows = len(columns[0])
    for col in columns:
        if len(col) != rows:
            raise ValueError("CSV columns must have equal length")
    lines = [",".join(header)]
    for i in range(rows):
        lines.append(",".join(f"{float(col[i]):.17g}" for col in columns))
    _atomic_write(path, "\n".join(lines) + "\n")


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def save_json(path: str, obj) -> None:
    _atomic_write(path, dump_json(obj) + "\n")
