"""Finite identities and order properties behind the limit theorems.

Each function evaluates both sides of an identity (or both halves of an
order relation) so callers can compare them at a tolerance of their choice.
"""
from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from . import numlin
from .errors import DimensionMismatch


class Identity(NamedTuple):
    lhs: complex
    rhs: complex

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)


def cauchy_binet(a, b) -> Identity:
    """``det(a b)`` against ``sum_J det(a[:, J]) det(b[J, :])`` for ``a`` p x n, ``b`` n x p."""
    a = numlin.as_matrix(a, "a")
    b = numlin.as_matrix(b, "b")
    p, n = a.shape
    if b.shape != (n, p) or p > n:
        raise DimensionMismatch(f"need a (p x n) and b (n x p) with p <= n, got {a.shape}, {b.shape}")
    rows = range(p)
    total = 0j
    for J in itertools.combinations(range(n), p):
        total += numlin.minor_det(a, rows, J) * numlin.minor_det(b, J, rows)
    return Identity(complex(numlin.det(a @ b)), total)


def unitary_minor_sum(u, p: int) -> Identity:
    """``sum_J |det(u[:p, J])|^2``, which equals 1 for unitary ``u``."""
    u = numlin.as_matrix(u, "u")
    n = u.shape[1]
    if not 1 <= p <= u.shape[0]:
        raise numlin.IndexOutOfRange(f"p={p} outside 1..{u.shape[0]}")
    rows = range(p)
    total = sum(abs(numlin.minor_det(u, rows, J)) ** 2 for J in itertools.combinations(range(n), p))
    return Identity(1.0, float(total))


def monotone_root_property(a, b, m: int, tol: float = 1e-9) -> bool:
    """For ``a <= b`` in the Loewner order, check ``a^(1/(2m)) <= b^(1/(2m))``."""
    a = numlin.as_psd(a)
    b = numlin.as_psd(b)
    if not numlin.loewner_leq(a, b, tol):
        raise ValueError("inputs are not Loewner ordered")
    r = 1.0 / (2 * m)
    return numlin.loewner_leq(numlin.psd_power(a, r), numlin.psd_power(b, r), tol)


class SandwichReport(NamedTuple):
    ordered: bool
    distances: np.ndarray  # |B_m - limit|_F along the sequence
    outer_distances: np.ndarray  # max(|A_m - limit|_F, |C_m - limit|_F)


def sandwich_property(lower, middle, upper, limit, tol: float = 1e-9) -> SandwichReport:
    """Squeeze check for PSD sequences ``lower[k] <= middle[k] <= upper[k]``.

    Returns the Loewner-order flag and the distances of the middle and outer
    sequences to ``limit``; the middle distance should shrink with the
    outer ones.
    """
    if not len(lower) == len(middle) == len(upper):
        raise DimensionMismatch("sequences differ in length")
    limit = numlin.as_matrix(limit, "limit")
    ordered = all(
        numlin.loewner_leq(lo, mi, tol) and numlin.loewner_leq(mi, up, tol)
        for lo, mi, up in zip(lower, middle, upper)
    )
    dist = np.array([np.linalg.norm(mi - limit) for mi in middle])
    outer = np.array(
        [max(np.linalg.norm(lo - limit), np.linalg.norm(up - limit)) for lo, up in zip(lower, upper)]
    )
    return SandwichReport(ordered, dist, outer)


__all__ = [
    "Identity",
    "SandwichReport",
    "cauchy_binet",
    "monotone_root_property",
    "sandwich_property",
    "unitary_minor_sum",
]
