"""Tolerance table shared by all modules.

Values are relative to the largest-modulus entry of the relevant input
unless stated otherwise.  The table is replaced wholesale, never mutated, so
readers always see a consistent snapshot.
"""
from __future__ import annotations

import contextlib
import dataclasses
import json
import os

ENV_VAR = "ASYMPOLAR_TOL_OVERRIDES"


@dataclasses.dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10
    psd_tol: float = 1e-10
    rank_tol: float = 1e-12
    pivot_tol: float = 1e-14
    group_tol: float = 1e-9
    abs_floor: float = 1e-12
    cond_max: float = 1e8
    # growth_exponent: Jordan coordinates below clean_tol*|y| are exact zeros
    clean_tol: float = 1e-10
    member_tol: float = 1e-8
    # None means half the smallest log-gap between consecutive moduli
    match_tol: float | None = None
    sl_tol: float = 1e-9


_current = Tolerances()


def get_tolerances() -> Tolerances:
    return _current


def set_tolerances(tol: Tolerances | None = None, **overrides) -> Tolerances:
    """Install a new table and return the previous one."""
    global _current
    previous = _current
    base = tol if tol is not None else _current
    _current = dataclasses.replace(base, **overrides)
    return previous


@contextlib.contextmanager
def tolerances(**overrides):
    previous = set_tolerances(**overrides)
    try:
        yield _current
    finally:
        set_tolerances(previous)


def overrides_from_env(environ=None) -> dict:
    """Parse the JSON object held in ``ASYMPOLAR_TOL_OVERRIDES``."""
    environ = os.environ if environ is None else environ
    raw = environ.get(ENV_VAR)
    if not raw:
        return {}
    data = json.loads(raw)
    if not isinstance(data, dict):
        raise ValueError(f"{ENV_VAR} must hold a JSON object")
    known = {f.name for f in dataclasses.fields(Tolerances)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown tolerance(s) in {ENV_VAR}: {sorted(unknown)}")
    return data
