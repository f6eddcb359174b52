"""JSON matrix files and Jordan specs.

Plain matrix::

    {"rows": 2, "cols": 2, "data": [[re, im], [re, im], ...]}   # row-major

Structured input::

    {"jordan": {"M": <matrix>, "blocks": [[re, im, size], ...]}}

Either form may be wrapped as ``{"group": "sl", ...}`` (or
``{"group": "sl", "matrix": <matrix>}``) to request the determinant-one
check.  Floats are written with ``repr``, which round-trips exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AsymPolarError, ParseError
from .jordan import JordanSpec


@dataclass(frozen=True, eq=False)
class LoadedInput:
    """A parsed file: exactly one of ``matrix`` or ``spec`` is set."""

    matrix: np.ndarray | None = None
    spec: JordanSpec | None = None
    group: str | None = None


def _number(x, what) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(f"{what}: expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise ParseError(f"{what}: non-finite value")
    return x


def _count(x, what) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 1:
        raise ParseError(f"{what}: expected a positive integer, got {x!r}")
    return x


def matrix_from_json(obj) -> np.ndarray:
    """Parse the plain matrix form; real when every imaginary part is zero."""
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= obj.keys():
        raise ParseError('matrix must be an object with "rows", "cols" and "data"')
    rows = _count(obj["rows"], "rows")
    cols = _count(obj["cols"], "cols")
    data = obj["data"]
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"data must hold rows*cols = {rows * cols} entries")
    out = np.empty(rows * cols, dtype=complex)
    for i, entry in enumerate(data):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            entry = [entry, 0.0]
        if not isinstance(entry, list) or len(entry) != 2:
            raise ParseError(f"data[{i}] must be a [re, im] pair")
        out[i] = complex(_number(entry[0], f"data[{i}]"), _number(entry[1], f"data[{i}]"))
    out = out.reshape(rows, cols)
    if not np.any(out.imag):
        return out.real.copy()
    return out


def matrix_to_json(a) -> dict:
    a = np.atleast_2d(np.asarray(a))
    flat = a.astype(complex).ravel()
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def spec_from_json(obj) -> JordanSpec:
    if not isinstance(obj, dict) or not {"M", "blocks"} <= obj.keys():
        raise ParseError('jordan spec must hold "M" and "blocks"')
    M = matrix_from_json(obj["M"])
    blocks = []
    if not isinstance(obj["blocks"], list) or not obj["blocks"]:
        raise ParseError("blocks must be a non-empty list")
    for i, blk in enumerate(obj["blocks"]):
        if not isinstance(blk, list) or len(blk) != 3:
            raise ParseError(f"blocks[{i}] must be [re, im, size]")
        mu = complex(_number(blk[0], f"blocks[{i}]"), _number(blk[1], f"blocks[{i}]"))
        blocks.append((mu, _count(blk[2], f"blocks[{i}] size")))
    if sum(s for _, s in blocks) != M.shape[0] or M.shape[0] != M.shape[1]:
        raise ParseError(f"block sizes sum to {sum(s for _, s in blocks)} but M has shape {M.shape}")
    return JordanSpec(M, tuple(blocks))


def spec_to_json(spec: JordanSpec) -> dict:
    return {
        "jordan": {
            "M": matrix_to_json(spec.M),
            "blocks": [[mu.real, mu.imag, s] for mu, s in spec.blocks],
        }
    }


def input_from_json(obj) -> LoadedInput:
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    group = obj.get("group")
    if group is not None:
        if group != "sl":
            raise ParseError(f"unknown group {group!r}")
        inner = obj.get("matrix", {k: v for k, v in obj.items() if k != "group"})
        loaded = input_from_json(inner)
        return LoadedInput(loaded.matrix, loaded.spec, "sl")
    if "jordan" in obj:
        return LoadedInput(spec=spec_from_json(obj["jordan"]))
    return LoadedInput(matrix=matrix_from_json(obj))


def load_input(path) -> LoadedInput:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        return input_from_json(obj)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except AsymPolarError:
        raise


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


__all__ = [
    "LoadedInput",
    "dump_json",
    "input_from_json",
    "load_input",
    "matrix_from_json",
    "matrix_to_json",
    "spec_from_json",
    "spec_to_json",
]
