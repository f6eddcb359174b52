"""Limits of ``|B A^m C|^(1/m)``: closed forms and the numeric iteration engine.

Closed forms
    ``predicted_limit_right`` returns ``Q^* D Q`` from the LQ factorization
    ``M^{-1} C = L Q``; ``predicted_limit_left`` returns ``Q D Q^*`` from
    ``B M = Q R``.  Neither consumes the other outer factor.

Numerics
    ``iterate_limit`` evaluates the actual finite-m iterates through the
    graded extended-precision product in :mod:`asympolar._extended`, so
    ``m = 2**16`` (or ``2**30``) is as cheap as ``m = 4``.

Exponent growth
    ``nayak_projections`` and ``growth_exponent`` cover the projection
    decomposition of ``lim |A^m|^(1/m)`` and the classification of vectors by
    ``lim |A^m x|^(1/m)``.
"""
from __future__ import annotations

import concurrent.futures
import dataclasses
import io
import math
from typing import Sequence

import mpmath
import numpy as np

from . import numlin
from ._extended import from_mp, graded_root, singular_values as mp_singular_values, to_mp
from .config import get_tolerances
from .errors import (
    AmbiguousClassification,
    RankDeficient,
    ScheduleError,
    SingularB,
    SingularC,
    SingularInput,
    SingularL,
    SingularMatrix,
    ZeroVector,
)
from .jordan import JordanSpec, cmjd_from_spec, moduli_groups, power_factors

DEFAULT_SCHEDULE = tuple(4 ** k for k in range(1, 9))  # 4 .. 2**16


@dataclasses.dataclass(frozen=True, eq=False)
class LimitResult:
    limit: np.ndarray
    Q: np.ndarray
    D: np.ndarray
    gammas: tuple
    multiplicities: tuple
    side: str = "right"


def _check_nonsingular(X, exc, name):
    X = numlin.as_matrix(X, name)
    if X.shape[0] != X.shape[1]:
        raise numlin.DimensionMismatch(f"{name} must be square, got {X.shape}")
    try:
        cond = numlin.cond2(X)
    except SingularMatrix as err:
        raise exc(f"{name} is singular") from err
    if not cond < 1.0 / get_tolerances().rank_tol:
        raise exc(f"{name} is numerically singular (cond {cond:.3e})")
    return X


def _sorted_hyperbolic(M, D):
    D = np.asarray(D, dtype=float)
    order = np.argsort(-D, kind="stable")
    return numlin.as_matrix(M, "M")[:, order], D[order]


def limit_from_hyperbolic(M, D, C) -> LimitResult:
    """``lim |B A^m C|^(1/m)`` given only the hyperbolic part ``H = M diag(D) M^{-1}``.

    Columns of ``M`` are reordered so that ``D`` is descending.
    """
    M, D = _sorted_hyperbolic(M, D)
    C = numlin.as_matrix(C, "C")
    if C.shape != M.shape:
        raise numlin.DimensionMismatch(f"C has shape {C.shape}, expected {M.shape}")
    # the rank test inside lq doubles as the nonsingularity check on C
    try:
        L, Q = numlin.lq(numlin.solve(M, C))
    except RankDeficient as err:
        raise SingularC("C is numerically singular") from err
    limit = (numlin.adjoint(Q) * D) @ Q
    gammas, mults = moduli_groups(D)
    return LimitResult((limit + numlin.adjoint(limit)) / 2, Q, D, gammas, mults, "right")


def predicted_limit_right(spec: JordanSpec, C) -> LimitResult:
    """Closed-form ``lim_m |B A^m C|^(1/m) = Q^* D Q`` where ``M^{-1} C = L Q``.

    Independent of ``B``, which is therefore not a parameter.
    """
    return limit_from_hyperbolic(spec.M, spec.D, C)


def predicted_limit_left(spec: JordanSpec, B) -> LimitResult:
    """Closed-form ``lim_m |B A^m C|'^(1/m) = Q D Q^*`` where ``B M = Q R``."""
    B = numlin.as_matrix(B, "B")
    if B.shape != spec.M.shape:
        raise numlin.DimensionMismatch(f"B has shape {B.shape}, expected {spec.M.shape}")
    try:
        Q, _ = numlin.qr(B @ spec.M)
    except RankDeficient as err:
        raise SingularB("B M is rank deficient") from err
    D = spec.D
    limit = (Q * D) @ numlin.adjoint(Q)
    gammas, mults = spec.groups
    return LimitResult((limit + numlin.adjoint(limit)) / 2, Q, D, gammas, mults, "left")


# ----------------------------------------------------------------------------
# iteration engine


@dataclasses.dataclass(eq=False)
class ConvergenceReport:
    schedule: tuple
    iterates: list
    predicted: np.ndarray
    D: np.ndarray
    frob_errors: np.ndarray
    spec_errors: np.ndarray
    sv_errors: np.ndarray
    log_singular_values: list = dataclasses.field(default_factory=list)

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("m,frob_error,spec_error,sv_error\n")
        for m, f, s, v in zip(self.schedule, self.frob_errors, self.spec_errors, self.sv_errors):
            buf.write(f"{m},{f:.17g},{s:.17g},{v:.17g}\n")
        return buf.getvalue()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())

    @property
    def final_frob_error(self) -> float:
        return float(self.frob_errors[-1])

    def tail_decreasing(self, points: int = 3) -> bool:
        tail = self.frob_errors[-points:]
        return bool(np.all(np.diff(tail) < 0))


def check_schedule(schedule, minimum: int = 1) -> tuple:
    schedule = tuple(int(m) for m in schedule)
    if not schedule:
        raise ScheduleError("empty schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ScheduleError("schedule must be strictly increasing")
    if schedule[0] < max(1, minimum):
        raise ScheduleError(
            f"schedule starts at m={schedule[0]}, below the required minimum {max(1, minimum)}"
        )
    if schedule[-1] > 2 ** 30:
        raise ScheduleError("schedule exceeds m = 2**30")
    return schedule


def working_digits(spec: JordanSpec, m: int, *conds: float) -> int:
    """Decimal digits that cover polynomial-in-m conditioning plus input conditioning."""
    tmax = max(spec.sizes)
    digits = 30 + 2 * (tmax - 1) * math.log10(m + 1)
    for c in (spec.cond,) + conds:
        digits += math.log10(max(c, 1.0))
    return int(math.ceil(digits))


def _root_point(spec: JordanSpec, B, C, m: int, side: str):
    """One iterate ``|B A^m C|^(1/m)`` (or the left modulus) and its log singular values."""
    dps = working_digits(spec, m, numlin.cond2(B), numlin.cond2(C))
    with mpmath.workdps(dps):
        G, logs = power_factors(spec, m)
        Mmp = to_mp(spec.M)
        Minv = mpmath.inverse(Mmp)
        Bmp, Cmp = to_mp(B), to_mp(C)
        if side == "right":
            F = Bmp * Mmp * G
            W = Minv * Cmp
        else:
            F = Cmp.transpose_conj() * Minv.transpose_conj() * G.transpose_conj()
            W = Mmp.transpose_conj() * Bmp.transpose_conj()
    return graded_root(F, logs, W, m, dps)


def _report(schedule, results, predicted, D) -> ConvergenceReport:
    iterates = [r[0] for r in results]
    logsv = [r[1] for r in results]
    frob = np.array([np.linalg.norm(x - predicted) for x in iterates])
    spec_err = np.array([numlin.norm2(x - predicted) for x in iterates])
    D = np.sort(np.asarray(D, dtype=float))[::-1]
    sv = []
    for m, ls in zip(schedule, logsv):
        roots = np.where(np.isfinite(ls), np.exp(ls / m), 0.0)
        sv.append(float(np.max(np.abs(roots - D))))
    return ConvergenceReport(
        tuple(schedule), iterates, predicted, D, frob, spec_err, np.array(sv), logsv
    )


def iterate_limit(
    spec: JordanSpec,
    B,
    C,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    side: str = "right",
    jobs: int = 1,
) -> ConvergenceReport:
    """Numeric iterates of ``|B A^m C|^(1/m)`` (side "right") or ``|B A^m C|'^(1/m)`` ("left").

    Each iterate is computed from the exact Jordan-form power with
    per-modulus log scaling; eigenvalues of ``|X|`` are rooted as
    ``exp((log s + log_scale) / m)``.  Errors are measured against the
    matching closed-form limit.
    """
    if side not in ("right", "left"):
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    B = _check_nonsingular(B, SingularInput, "B")
    C = _check_nonsingular(C, SingularInput, "C")
    schedule = check_schedule(schedule, spec.nilpotent_index)
    predicted = predicted_limit_right(spec, C) if side == "right" else predicted_limit_left(spec, B)
    if jobs > 1 and len(schedule) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_root_point, spec, B, C, m, side) for m in schedule]
            results = [f.result() for f in futures]
    else:
        results = [_root_point(spec, B, C, m, side) for m in schedule]
    return _report(schedule, results, predicted.limit, predicted.D)


# ----------------------------------------------------------------------------
# projections and growth exponents


@dataclasses.dataclass(frozen=True, eq=False)
class NayakProjections:
    projections: tuple  # E_1 >= E_2 >= ... >= E_s; E_{s+1} = 0 implicit
    gammas: tuple
    multiplicities: tuple
    reconstruction: np.ndarray
    Q: np.ndarray

    def E(self, j: int) -> np.ndarray:
        """Projection ``E_j`` with 1-based ``j``; ``E_{s+1} = 0``."""
        n = self.Q.shape[0]
        if j == len(self.projections) + 1:
            return np.zeros((n, n), dtype=self.Q.dtype)
        return self.projections[j - 1]

    def level(self, x, tol: float | None = None) -> int:
        """The 1-based ``j`` with ``x`` in ``Im E_j`` but not ``Im E_{j+1}``."""
        x = np.asarray(x, dtype=complex).ravel()
        nx = np.linalg.norm(x)
        if nx == 0:
            raise ZeroVector("x must be nonzero")
        tol = get_tolerances().member_tol if tol is None else tol
        j = 1
        for k in range(2, len(self.projections) + 1):
            if np.linalg.norm(self.projections[k - 1] @ x - x) <= tol * nx:
                j = k
            else:
                break
        return j


def nayak_projections(spec: JordanSpec) -> NayakProjections:
    """Nested orthogonal projections onto sums of generalized eigenspaces.

    ``E_j`` projects onto the span of the generalized eigenvectors whose
    eigenvalue moduli are at most ``gamma_j``.  With ``M^{-1} = L Q`` the
    columns of ``Q^*`` split by group multiplicities give
    ``E_j - E_{j+1} = Q_j Q_j^*``.
    """
    _, Q = numlin.lq(spec.Minv())
    Qs = numlin.adjoint(Q)
    gammas, mults = spec.groups
    bounds = np.cumsum((0,) + mults)
    pieces = [Qs[:, bounds[i]:bounds[i + 1]] for i in range(len(mults))]
    projections = []
    for j in range(len(pieces)):
        cols = np.hstack(pieces[j:])
        P = cols @ numlin.adjoint(cols)
        projections.append((P + numlin.adjoint(P)) / 2)
    n = spec.n
    recon = np.zeros((n, n), dtype=complex)
    for g, piece in zip(gammas, pieces):
        recon += g * (piece @ numlin.adjoint(piece))
    return NayakProjections(tuple(projections), gammas, mults, (recon + numlin.adjoint(recon)) / 2, Q)


@dataclasses.dataclass(frozen=True)
class GrowthResult:
    estimate: float
    classified_j: int
    membership_j: int
    estimates: tuple
    schedule: tuple


def _growth_estimate(spec: JordanSpec, y, m: int) -> float:
    """``|A^m x|^(1/m)`` from cleaned Jordan coordinates ``y``, scaled by the leading modulus."""
    lead = None
    for (mu, s), sl in zip(spec.blocks, spec.block_slices):
        if np.any(y[sl] != 0):
            lead = abs(mu)
            break
    if lead is None or lead == 0:
        return 0.0
    n = spec.n
    v = np.zeros(n, dtype=complex)
    for (mu, s), sl in zip(spec.blocks, spec.block_slices):
        if mu == 0 or not np.any(y[sl] != 0):
            continue
        logrel = m * (math.log(abs(mu)) - math.log(lead))
        if logrel < -745:
            continue
        ang = math.fmod(m * math.atan2(mu.imag, mu.real), 2 * math.pi)
        factor = math.exp(logrel) * complex(math.cos(ang), math.sin(ang))
        blk = np.zeros((s, s), dtype=complex)
        for j in range(min(s, m + 1)):
            idx = np.arange(s - j)
            blk[idx, idx + j] = math.comb(m, j) * mu ** (-j)
        v[sl] = factor * (blk @ y[sl])
    w = spec.M @ v
    nw = np.linalg.norm(w)
    if nw == 0:
        return 0.0
    return math.exp((math.log(nw) + m * math.log(lead)) / m)


def growth_exponent(spec: JordanSpec, x, schedule: Sequence[int] = DEFAULT_SCHEDULE) -> GrowthResult:
    """Estimate ``lim |A^m x|^(1/m)`` and classify ``x`` by modulus group.

    ``classified_j`` is the 1-based group whose modulus is nearest the
    estimate in log space; ``membership_j`` comes independently from the
    projections ``E_j``.  The two must agree.  Jordan coordinates of ``x``
    smaller than ``clean_tol * |y|`` are treated as exact zeros: at large m a
    rounding-level residue in a dominant eigenspace would otherwise swamp
    the true growth rate.
    """
    x = np.asarray(x, dtype=complex).ravel()
    if x.shape != (spec.n,):
        raise numlin.DimensionMismatch(f"x has {x.size} entries, expected {spec.n}")
    if np.linalg.norm(x) == 0:
        raise ZeroVector("x must be nonzero")
    schedule = check_schedule(schedule, spec.nilpotent_index)
    tol = get_tolerances()
    y = numlin.solve(spec.M, x)
    ny = np.linalg.norm(y)
    gammas, mults = spec.groups
    bounds = np.cumsum((0,) + mults)
    for g in range(len(mults)):
        sl = slice(bounds[g], bounds[g + 1])
        if np.linalg.norm(y[sl]) <= tol.clean_tol * ny:
            y[sl] = 0
    estimates = tuple(_growth_estimate(spec, y, m) for m in schedule)
    est = estimates[-1]

    logs = [math.log(g) if g > 0 else -math.inf for g in gammas]
    finite = [v for v in logs if math.isfinite(v)]
    gaps = [a - b for a, b in zip(finite, finite[1:])]
    match_tol = tol.match_tol if tol.match_tol is not None else (min(gaps) / 2 if gaps else math.inf)
    if est == 0.0:
        candidates = [j for j, g in enumerate(gammas) if g == 0]
        if not candidates:
            raise AmbiguousClassification("estimate is 0 but no modulus group is zero")
        classified = candidates[0] + 1
    else:
        le = math.log(est)
        dist = [abs(le - v) if math.isfinite(v) else math.inf for v in logs]
        best = int(np.argmin(dist))
        if not dist[best] <= match_tol:
            order = np.argsort(dist)[:2]
            raise AmbiguousClassification(
                f"estimate {est:.6g} is not within match_tol of any modulus; "
                f"nearest {[gammas[i] for i in order]}"
            )
        classified = best + 1
    membership = nayak_projections(spec).level(x)
    if classified != membership:
        raise AmbiguousClassification(
            f"growth estimate {est:.6g} selects group {classified}, projections select {membership}"
        )
    return GrowthResult(est, classified, membership, estimates, schedule)


# ----------------------------------------------------------------------------
# supporting limits


def diag_lower_limit(D, L, schedule: Sequence[int] = DEFAULT_SCHEDULE) -> ConvergenceReport:
    """Iterates of ``|D^m L|^(1/m)`` for descending nonnegative ``D`` and lower-triangular ``L``.

    The limit is ``diag(D)``.
    """
    D = np.asarray(D, dtype=float).ravel()
    if np.any(D < 0) or np.any(np.diff(D) > 0):
        raise ValueError("D must be nonnegative and non-increasing")
    L = numlin.as_matrix(L, "L")
    n = D.size
    if L.shape != (n, n):
        raise numlin.DimensionMismatch(f"L has shape {L.shape}, expected {(n, n)}")
    if numlin.max_abs(np.triu(L, 1)) != 0:
        raise ValueError("L must be lower triangular")
    if np.any(np.abs(np.diag(L)) == 0):
        raise SingularL("L has a zero diagonal entry")
    schedule = check_schedule(schedule)
    results = []
    for m in schedule:
        dps = 30 + int(math.ceil(math.log10(max(numlin.cond2(L), 1.0))))
        with mpmath.workdps(dps):
            logs = [m * mpmath.log(d) if d > 0 else mpmath.ninf for d in D]
            eye = mpmath.eye(n)
            results.append(graded_root(eye, logs, to_mp(L), m, dps))
    return _report(schedule, results, np.diag(D).astype(complex), D)


@dataclasses.dataclass(eq=False)
class PerturbationReport(ConvergenceReport):
    kind: str = ""
    s_max_roots: np.ndarray = None
    s_min_roots: np.ndarray = None
    reference_gaps: np.ndarray = None  # | |B_m A_m|^(1/m) - |A_m|^(1/m) |_F


def _random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, _ = numlin.qr(z)
    return q


def perturbed_limit_property(
    kind: str,
    spec: JordanSpec,
    schedule: Sequence[int] = DEFAULT_SCHEDULE,
    seed: int = 0,
) -> PerturbationReport:
    """Check the sub-exponential perturbation lemma on three families of ``B_m``.

    ``A_m = D^m L`` where ``M^{-1} = L Q`` comes from ``spec``.  The report
    records ``s_1(B_m)^(1/m)``, ``s_n(B_m)^(1/m)``, the distance of
    ``|B_m A_m|^(1/m)`` to ``diag(D)`` and to ``|A_m|^(1/m)``.

    kinds: ``"elliptic-unipotent"`` (``B_m = E^m U^m M``), ``"unitary"``
    (random unitary per m), ``"bounded-polynomial"`` (``I + m N_1 + m^2 N_2``
    with strictly upper ``N_i``).
    """
    kinds = ("elliptic-unipotent", "unitary", "bounded-polynomial")
    if kind not in kinds:
        raise ValueError(f"kind must be one of {kinds}")
    schedule = check_schedule(schedule, spec.nilpotent_index)
    n = spec.n
    L, _ = numlin.lq(spec.Minv())
    D = spec.D
    rng = np.random.default_rng(seed)
    N1 = np.triu(rng.normal(size=(n, n)), 1)
    N2 = np.triu(rng.normal(size=(n, n)), 1)
    results, reference, smax, smin = [], [], [], []
    for m in schedule:
        dps = working_digits(spec, m, numlin.cond2(L)) + 10
        with mpmath.workdps(dps):
            if kind == "elliptic-unipotent":
                G, _ = power_factors(spec, m, zero_blocks="unipotent")
                Bm = to_mp(spec.M) * G
            elif kind == "unitary":
                Bm = to_mp(_random_unitary(np.random.default_rng([seed, m]), n))
            else:
                Bm = to_mp(np.eye(n) + m * N1 + m * m * N2)
            logs = [m * mpmath.log(d) if d > 0 else mpmath.ninf for d in D]
            Lmp = to_mp(L)
            sv = mp_singular_values(Bm, dps)
            smax.append(float(mpmath.exp(mpmath.log(sv[0]) / m)))
            smin.append(float(mpmath.exp(mpmath.log(sv[-1]) / m)))
            ref = graded_root(mpmath.eye(n), logs, Lmp, m, dps)
            results.append(graded_root(Bm, logs, Lmp, m, dps))
        reference.append(ref[0])
    base = _report(schedule, results, np.diag(D).astype(complex), D)
    gaps = np.array([np.linalg.norm(a - b) for a, b in zip(base.iterates, reference)])
    return PerturbationReport(
        **{f.name: getattr(base, f.name) for f in dataclasses.fields(ConvergenceReport)},
        kind=kind,
        s_max_roots=np.array(smax),
        s_min_roots=np.array(smin),
        reference_gaps=gaps,
    )


def cmjd_sandwich_factor(spec: JordanSpec, B, m: int):
    """``B E^m U^m M`` in extended precision (``m >= nilpotent index``), as numpy."""
    dps = working_digits(spec, m, numlin.cond2(B))
    with mpmath.workdps(dps):
        G, _ = power_factors(spec, m, zero_blocks="unipotent")
        return from_mp(to_mp(B) * to_mp(spec.M) * G)


__all__ = [
    "DEFAULT_SCHEDULE",
    "ConvergenceReport",
    "GrowthResult",
    "LimitResult",
    "NayakProjections",
    "PerturbationReport",
    "check_schedule",
    "cmjd_from_spec",
    "diag_lower_limit",
    "growth_exponent",
    "iterate_limit",
    "limit_from_hyperbolic",
    "nayak_projections",
    "perturbed_limit_property",
    "predicted_limit_left",
    "predicted_limit_right",
]
