"""Structured input ``A = M J M^{-1}``, the multiplicative Jordan factors, and powers.

A matrix enters either exactly, as a :class:`JordanSpec` (similarity ``M``
plus an ordered list of Jordan blocks), or numerically through
:func:`cmjd_numeric`, which only accepts diagonalizable input.  Numeric
Jordan forms of defective matrices are never attempted.
"""
from __future__ import annotations

import dataclasses
import math
from typing import NamedTuple, Sequence

import mpmath
import numpy as np

from . import numlin
from .config import get_tolerances
from .errors import Overflow, ScheduleError, SingularM, SingularMatrix


def moduli_groups(D: Sequence[float], group_tol: float | None = None, abs_floor: float | None = None):
    """Split a descending vector of moduli into runs of (numerically) equal values.

    Consecutive entries stay in one run while their ratio exceeds
    ``1 - group_tol``; entries at or below ``abs_floor`` form the zero run.
    Returns ``(gammas, multiplicities)``, each run represented by its first
    (largest) member.
    """
    tol = get_tolerances()
    group_tol = tol.group_tol if group_tol is None else group_tol
    abs_floor = tol.abs_floor if abs_floor is None else abs_floor
    gammas: list[float] = []
    mults: list[int] = []
    for d in D:
        d = float(d)
        if gammas and numlin._same_modulus(gammas[-1], d, group_tol, abs_floor):
            mults[-1] += 1
            continue
        gammas.append(0.0 if d <= abs_floor else d)
        mults.append(1)
    return tuple(gammas), tuple(mults)


def jordan_block(mu: complex, size: int) -> np.ndarray:
    return mu * np.eye(size, dtype=complex) + np.eye(size, k=1, dtype=complex)


@dataclasses.dataclass(frozen=True, eq=False)
class JordanSpec:
    """``A = M (J(mu_1) + ... + J(mu_k)) M^{-1}`` with blocks sorted by modulus.

    ``blocks`` is a sequence of ``(mu, size)``.  Blocks are reordered by
    descending modulus (ties: argument in ``[0, 2 pi)``, then input order)
    and the columns of ``M`` are permuted along with them.
    """

    M: np.ndarray
    blocks: tuple
    cond: float = dataclasses.field(init=False)
    moduli: np.ndarray = dataclasses.field(init=False, repr=False)

    def __post_init__(self):
        tol = get_tolerances()
        M = numlin.as_matrix(self.M, "M").astype(complex)
        blocks = []
        for mu, size in self.blocks:
            size = int(size)
            if size < 1:
                raise ValueError(f"Jordan block size must be positive, got {size}")
            mu = complex(mu)
            if abs(mu) <= tol.abs_floor:
                mu = 0j
            blocks.append((mu, size))
        n = sum(s for _, s in blocks)
        if M.shape != (n, n):
            raise numlin.DimensionMismatch(f"M has shape {M.shape} but blocks sum to {n}")
        starts = np.cumsum([0] + [s for _, s in blocks])
        order = numlin.order_eigenvalues([mu for mu, _ in blocks])
        cols = np.concatenate([np.arange(starts[i], starts[i + 1]) for i in order])
        blocks = tuple(blocks[i] for i in order)
        M = M[:, cols]
        try:
            cond = numlin.cond2(M)
        except SingularMatrix as exc:
            raise SingularM("similarity M is singular") from exc
        if not cond < 1.0 / tol.rank_tol:
            raise SingularM(f"similarity M is numerically singular (cond {cond:.3e})")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "cond", cond)
        # canonical moduli: every member of a modulus group carries the group value
        raw = [abs(mu) for mu, _ in blocks]
        gammas, mults = moduli_groups(raw)
        canon = np.repeat(gammas, mults)
        object.__setattr__(self, "moduli", canon)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def sizes(self) -> tuple:
        return tuple(s for _, s in self.blocks)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([[mu] * s for mu, s in self.blocks]).astype(complex)

    @property
    def D(self) -> np.ndarray:
        """``diag(|lambda_1|, ..., |lambda_n|)`` as a vector, descending, group-canonical."""
        return np.repeat(self.moduli, self.sizes).astype(float)

    @property
    def groups(self):
        return moduli_groups(self.D)

    @property
    def is_real(self) -> bool:
        return numlin.max_abs(self.M.imag) == 0 and all(mu.imag == 0 for mu, _ in self.blocks)

    @property
    def nilpotent_index(self) -> int:
        """Largest Jordan block at eigenvalue 0 (0 when ``A`` is nonsingular)."""
        return max([s for mu, s in self.blocks if mu == 0], default=0)

    @property
    def block_slices(self) -> list:
        out, start = [], 0
        for _, s in self.blocks:
            out.append(slice(start, start + s))
            start += s
        return out

    def J(self) -> np.ndarray:
        n = self.n
        J = np.zeros((n, n), dtype=complex)
        for (mu, s), sl in zip(self.blocks, self.block_slices):
            J[sl, sl] = jordan_block(mu, s)
        return J

    def Minv(self) -> np.ndarray:
        return numlin.inv(self.M)

    def similar(self, diag_blocks: np.ndarray) -> np.ndarray:
        """``M X M^{-1}``, returned real when the spec is real."""
        out = self.M @ diag_blocks @ self.Minv()
        return out.real.copy() if self.is_real else out

    def to_dict(self) -> dict:
        return {"M": self.M, "blocks": [(mu, s) for mu, s in self.blocks]}


def assemble(spec: JordanSpec) -> np.ndarray:
    """The matrix ``M J M^{-1}`` described by ``spec``."""
    return spec.similar(spec.J())


class CmjdFactors(NamedTuple):
    E: np.ndarray
    H: np.ndarray
    U: np.ndarray
    D: np.ndarray
    gammas: tuple
    multiplicities: tuple
    singular_variant: bool


def cmjd_from_spec(spec: JordanSpec) -> CmjdFactors:
    """Elliptic, hyperbolic and unipotent factors ``A = E H U``.

    For singular ``A`` the elliptic and unipotent factors are the primed
    variants: identity on the zero-eigenvalue block for E, and ``I + J(0)``
    there for U.  Then ``A^m = E^m H^m U^m`` only once ``m`` reaches the
    largest nilpotent block.
    """
    n = spec.n
    e = np.zeros((n, n), dtype=complex)
    h = np.zeros((n, n), dtype=complex)
    u = np.zeros((n, n), dtype=complex)
    for (mu, s), sl in zip(spec.blocks, spec.block_slices):
        eye = np.eye(s)
        if mu == 0:
            e[sl, sl] = eye
            u[sl, sl] = eye + np.eye(s, k=1)
        else:
            e[sl, sl] = (mu / abs(mu)) * eye
            h[sl, sl] = abs(mu) * eye
            u[sl, sl] = jordan_block(mu, s) / mu
    gammas, mults = spec.groups
    return CmjdFactors(
        spec.similar(e),
        spec.similar(h),
        spec.similar(u),
        spec.D,
        gammas,
        mults,
        spec.nilpotent_index > 0,
    )


def cmjd_numeric(a) -> tuple[JordanSpec, CmjdFactors]:
    """CMJD of a diagonalizable matrix from its numerical eigen-decomposition."""
    eig = numlin.eig_general(a)
    spec = JordanSpec(eig.V, tuple((lam, 1) for lam in eig.lam))
    return spec, cmjd_from_spec(spec)


class ScaledPower(NamedTuple):
    """``A^m = base * exp(log_scale)``."""

    base: np.ndarray
    log_scale: float
    m: int

    def value(self) -> np.ndarray:
        return self.base * math.exp(self.log_scale)


def _check_power(spec: JordanSpec, m: int):
    if int(m) != m or m < 1:
        raise ScheduleError(f"exponent must be a positive integer, got {m}")
    if m < spec.nilpotent_index:
        raise ScheduleError(
            f"m={m} is below the largest nilpotent block size {spec.nilpotent_index}"
        )


def power_scaled(spec: JordanSpec, m: int) -> ScaledPower:
    """Closed-form ``A^m`` with the dominant growth ``gamma_1^m`` factored out.

    Entry ``(i, i+j)`` of a size-t block power is ``C(m, j) mu^(m-j)``; its
    magnitude is evaluated in log space and its phase by angle reduction,
    so exponents up to 2**30 are fine.
    """
    m = int(m)
    if m < 1:
        raise ScheduleError(f"exponent must be a positive integer, got {m}")
    gamma1 = float(spec.moduli[0]) if len(spec.moduli) else 0.0
    top = max((abs(mu) for mu, _ in spec.blocks), default=0.0)
    log_g1 = math.log(top) if top > 0 and gamma1 not in (0.0, 1.0) else 0.0
    n = spec.n
    P = np.zeros((n, n), dtype=complex)
    for (mu, s), sl in zip(spec.blocks, spec.block_slices):
        blk = np.zeros((s, s), dtype=complex)
        for j in range(s):
            if j > m:
                break
            if mu == 0:
                val = complex(math.exp(-m * log_g1)) if m == j else 0j
            else:
                logmag = math.log(math.comb(m, j)) + (m - j) * math.log(abs(mu)) - m * log_g1
                ang = math.fmod((m - j) * math.atan2(mu.imag, mu.real), 2 * math.pi)
                val = math.exp(logmag) * complex(math.cos(ang), math.sin(ang)) if logmag > -745 else 0j
            idx = np.arange(s - j)
            blk[idx, idx + j] = val
        P[sl, sl] = blk
    with np.errstate(over="ignore", invalid="ignore"):
        base = spec.M @ P @ spec.Minv()
    if not np.all(np.isfinite(base)):
        raise Overflow(f"scaled power overflows at m={m}")
    if spec.is_real:
        base = base.real.copy()
    return ScaledPower(base, m * log_g1, m)


def power_factors(spec: JordanSpec, m: int, zero_blocks: str = "zero"):
    """Extended-precision factors with ``J^m = G diag(exp(logs))``.

    ``G`` is block diagonal with blocks ``phase^m sum_j C(m, j) mu^-j N^j``
    (bounded by a polynomial in m) and ``logs[i] = m log|mu|`` per column,
    ``-inf`` on zero blocks.  With ``zero_blocks="unipotent"`` the zero blocks
    of ``G`` hold ``(I + N)^m`` instead, which gives the primed factor
    ``E'^m U'^m`` in Jordan coordinates.  Must run inside an mpmath precision
    context; returns an ``mpmath.matrix`` and a list of mpf.
    """
    _check_power(spec, m)
    n = spec.n
    G = mpmath.matrix(n, n)
    logs = []
    mm = mpmath.mpf(m)
    for (mu, s), sl in zip(spec.blocks, spec.block_slices):
        base = sl.start
        if mu == 0:
            logs.extend([mpmath.ninf] * s)
            if zero_blocks == "unipotent":
                for i in range(s):
                    for j in range(0, s - i):
                        G[base + i, base + i + j] = mpmath.binomial(m, j)
            continue
        mu_mp = mpmath.mpc(mu.real, mu.imag)
        modulus = abs(mu_mp)
        phase_m = (mu_mp / modulus) ** m
        logs.extend([mm * mpmath.log(modulus)] * s)
        inv_mu = 1 / mu_mp
        for i in range(s):
            for j in range(0, s - i):
                G[base + i, base + i + j] = phase_m * mpmath.binomial(m, j) * inv_mu ** j
    return G, logs


__all__ = [
    "CmjdFactors",
    "JordanSpec",
    "ScaledPower",
    "assemble",
    "cmjd_from_spec",
    "cmjd_numeric",
    "jordan_block",
    "moduli_groups",
    "power_factors",
    "power_scaled",
]
