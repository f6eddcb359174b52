"""The limit in ``SL_n(R)``: Cartan, Iwasawa, group CMJD and the adjoint picture.

Inside ``G = SL_n(R)`` the compact part is ``K = SO(n)``, ``A`` is the
positive diagonal matrices of determinant one, ``N`` the unit upper
triangular matrices and the Cartan involution is ``g -> g^{-T}``.  For
``g = e h u`` with ``h = q b q^{-1}`` and ``b`` in the descending chamber,

    lim |g1 g^m g2|^(1/m) = k b k^{-1},   g2^T q^{-T} = k a n.

The adjoint representation on traceless matrices turns every statement into
one about ``(n^2 - 1) x (n^2 - 1)`` matrices, where :mod:`asymlimit` applies
directly.
"""
from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np

from . import numlin
from .asymlimit import (
    ConvergenceReport,
    LimitResult,
    check_schedule,
    iterate_limit,
    limit_from_hyperbolic,
    predicted_limit_right,
)
from .config import get_tolerances
from .errors import NotInSL, PreconditionError
from .jordan import JordanSpec, assemble, cmjd_from_spec, cmjd_numeric


def as_sl(g, tol: float | None = None) -> np.ndarray:
    """Validate a real square matrix of determinant one."""
    g = numlin.as_matrix(g, "g")
    if g.shape[0] != g.shape[1]:
        raise numlin.DimensionMismatch(f"g must be square, got {g.shape}")
    if np.iscomplexobj(g):
        if numlin.max_abs(g.imag) > 0:
            raise NotInSL("g must be real")
        g = g.real
    g = np.array(g, dtype=float)
    tol = get_tolerances().sl_tol if tol is None else tol
    defect = abs(numlin.det(g) - 1.0)
    if not defect <= tol:
        raise NotInSL(f"|det(g) - 1| = {defect:.3e} exceeds {tol:.1e}")
    return g


class CartanPolar(NamedTuple):
    k: np.ndarray
    p: np.ndarray


def cartan_polar(g) -> CartanPolar:
    """``g = k p`` with ``k`` in SO(n) and ``p = (g^T g)^(1/2)``."""
    g = as_sl(g)
    p = numlin.psd_power(g.T @ g, 0.5).real
    k = numlin.solve(p.T, g.T).T  # g p^{-1}
    return CartanPolar(k, p)


class IwasawaKAN(NamedTuple):
    k: np.ndarray
    a: np.ndarray
    nfac: np.ndarray


def iwasawa(g) -> IwasawaKAN:
    """``g = k a n``: orthogonal, positive diagonal, unit upper triangular."""
    g = as_sl(g)
    k, r = numlin.qr(g)
    k, r = k.real, r.real
    d = np.diag(r).copy()
    nfac = r / d[:, None]
    np.fill_diagonal(nfac, 1.0)
    return IwasawaKAN(k, np.diag(d), nfac)


@dataclasses.dataclass(frozen=True, eq=False)
class GroupCmjd:
    e: np.ndarray
    h: np.ndarray
    u: np.ndarray
    q: np.ndarray
    b: np.ndarray  # diagonal matrix, descending
    spec: JordanSpec


def _real_part(x, name):
    x = np.asarray(x)
    if np.iscomplexobj(x):
        scale = max(numlin.max_abs(x), 1.0)
        if numlin.max_abs(x.imag) > 1e-8 * scale:
            raise PreconditionError(f"{name} is not real")
        x = x.real
    return np.array(x, dtype=float)


def _real_basis(spec: JordanSpec) -> np.ndarray:
    """Real basis of each hyperbolic eigenspace, group by group, scaled into SL_n.

    The span of the generalized eigenvectors of one modulus group is closed
    under conjugation for real ``g``, so its real and imaginary parts span
    a real subspace of the same dimension.
    """
    gammas, mults = spec.groups
    bounds = np.cumsum((0,) + mults)
    cols = []
    for i in range(len(mults)):
        Mg = spec.M[:, bounds[i]:bounds[i + 1]]
        stacked = np.hstack([Mg.real, Mg.imag])
        U, S, _ = numlin.svd(stacked)
        cols.append(U[:, : mults[i]].real)
    q = np.hstack(cols)
    d = numlin.det(q).real
    n = q.shape[0]
    q = q / abs(d) ** (1.0 / n)
    if d < 0:
        q[:, -1] = -q[:, -1]
    return q


def group_cmjd(g, spec: JordanSpec | None = None) -> GroupCmjd:
    """Elliptic, hyperbolic, unipotent parts of ``g`` and ``h = q b q^{-1}``.

    Without ``spec`` the matrix must be numerically diagonalizable.  A
    ``spec`` lets defective elements through; it must reproduce ``g``.
    """
    g = as_sl(g)
    if spec is None:
        spec, factors = cmjd_numeric(g)
    else:
        if spec.n != g.shape[0]:
            raise numlin.DimensionMismatch("spec and g differ in size")
        gap = numlin.max_abs(assemble(spec) - g)
        if gap > 1e-9 * max(numlin.max_abs(g), 1.0):
            raise PreconditionError(f"spec does not reproduce g (max gap {gap:.3e})")
        factors = cmjd_from_spec(spec)
    if spec.nilpotent_index:
        raise PreconditionError("elements of SL_n are nonsingular")
    e = _real_part(factors.E, "e")
    h = _real_part(factors.H, "h")
    u = _real_part(factors.U, "u")
    q = _real_basis(spec)
    b = np.diag(spec.D)
    return GroupCmjd(e, h, u, q, b, spec)


# ----------------------------------------------------------------------------
# adjoint representation


def sl_basis(n: int) -> np.ndarray:
    """Trace-orthonormal basis of the traceless ``n x n`` matrices, by descending root height.

    Order: ``E_ij`` (i < j) by decreasing ``j - i`` then ``i``; the diagonal
    basis ``H_k = diag(1, ..., 1, -k, 0, ...) / sqrt(k (k + 1))``; then
    ``E_ij`` (i > j) by increasing ``i - j`` then ``j``.  With this order
    ``Ad`` of a unit upper triangular matrix is unit upper triangular.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    out = []
    upper = sorted(((i, j) for i in range(n) for j in range(i + 1, n)), key=lambda t: (-(t[1] - t[0]), t[0]))
    for i, j in upper:
        X = np.zeros((n, n))
        X[i, j] = 1.0
        out.append(X)
    for k in range(1, n):
        X = np.zeros((n, n))
        X[np.arange(k), np.arange(k)] = 1.0
        X[k, k] = -k
        out.append(X / np.sqrt(k * (k + 1)))
    lower = sorted(((i, j) for i in range(n) for j in range(i)), key=lambda t: (t[0] - t[1], t[1]))
    for i, j in lower:
        X = np.zeros((n, n))
        X[i, j] = 1.0
        out.append(X)
    return np.array(out)


def _ad(g) -> np.ndarray:
    """Conjugation ``X -> g X g^{-1}`` in the basis of :func:`sl_basis`; any invertible ``g``."""
    g = numlin.as_matrix(g, "g")
    basis = sl_basis(g.shape[0])
    ginv = numlin.inv(g)
    images = np.einsum("ij,ljk,km->lim", g, basis, ginv)
    out = np.einsum("kij,lij->kl", basis, images)
    return out.real.copy() if not np.iscomplexobj(out) or numlin.max_abs(out.imag) == 0 else out


def ad(g) -> np.ndarray:
    """The adjoint matrix ``Ad(g)`` of an element of ``SL_n(R)``."""
    return _ad(as_sl(g))


def ad_weights(d) -> np.ndarray:
    """Eigenvalues of ``Ad(diag(d))`` in basis order: ``d_i / d_j`` on roots, 1 on the Cartan part."""
    d = np.asarray(d)
    n = d.size
    upper = sorted(((i, j) for i in range(n) for j in range(i + 1, n)), key=lambda t: (-(t[1] - t[0]), t[0]))
    lower = sorted(((i, j) for i in range(n) for j in range(i)), key=lambda t: (t[0] - t[1], t[1]))
    w = [d[i] / d[j] for i, j in upper] + [1.0] * (n - 1) + [d[i] / d[j] for i, j in lower]
    return np.array(w)


# ----------------------------------------------------------------------------
# the limit


@dataclasses.dataclass(frozen=True, eq=False)
class LieLimit:
    limit: np.ndarray
    k: np.ndarray
    b: np.ndarray
    q: np.ndarray


def lie_limit(g, g1=None, g2=None, q=None, spec: JordanSpec | None = None) -> LieLimit:
    """``lim |g1 g^m g2|^(1/m) = k b k^{-1}`` with ``g2^T q^{-T} = k a n``.

    ``g1`` only enters the numeric cross-check and is validated for
    symmetry with the iterated expression.  ``q`` may be replaced by any
    element with ``h = q b q^{-1}``; the limit does not depend on the choice.
    """
    g = as_sl(g)
    n = g.shape[0]
    if g1 is not None:
        as_sl(g1)
    g2 = np.eye(n) if g2 is None else as_sl(g2)
    cm = group_cmjd(g, spec)
    if q is None:
        q = cm.q
    else:
        q = as_sl(q)
        residual = numlin.max_abs(q @ cm.b @ numlin.inv(q) - cm.h)
        if residual > 1e-8 * max(numlin.max_abs(cm.h), 1.0):
            raise PreconditionError(f"q does not conjugate b to h (residual {residual:.3e})")
    # g2^T q^{-T} = (q^{-1} g2)^T
    x = numlin.solve(q, g2).T
    k = iwasawa(x).k
    limit = (k @ cm.b) @ k.T
    return LieLimit((limit + limit.T) / 2, k, cm.b, q)


def ad_prediction(g, g2=None, spec: JordanSpec | None = None) -> LimitResult:
    """Predicted ``lim |Ad(g1) Ad(g)^m Ad(g2)|^(1/m)`` computed entirely at the Ad level.

    Diagonalizable ``g``: the Jordan data of ``Ad(g)`` is read off from an
    eigenvector matrix ``V`` of ``g``; ``Ad(V)`` diagonalizes ``Ad(g)`` with
    eigenvalues ``lambda_i / lambda_j``.  Defective ``g``: the hyperbolic
    part ``Ad(q) Ad(b) Ad(q)^{-1}`` is used instead.
    """
    g = as_sl(g)
    n = g.shape[0]
    g2 = np.eye(n) if g2 is None else as_sl(g2)
    C = _ad(g2)
    if spec is None:
        spec, _ = cmjd_numeric(g)
    if all(s == 1 for s in spec.sizes):
        lam = spec.eigenvalues
        adspec = JordanSpec(_ad(spec.M), tuple((w, 1) for w in ad_weights(lam)))
        return predicted_limit_right(adspec, C)
    cm = group_cmjd(g, spec)
    return limit_from_hyperbolic(_ad(cm.q), ad_weights(np.diag(cm.b)), C)


@dataclasses.dataclass(eq=False)
class AdConsistency:
    lie: LieLimit
    ad_limit: np.ndarray
    ad_predicted: np.ndarray
    predicted_error: float
    modulus_errors: tuple
    report: ConvergenceReport | None
    numeric_error: float

    def ok(self, predicted_tol: float = 1e-7, modulus_tol: float = 1e-7, numeric_tol: float = 3e-3) -> bool:
        good = self.predicted_error <= predicted_tol and max(self.modulus_errors) <= modulus_tol
        if self.report is not None:
            good = good and self.numeric_error <= numeric_tol
        return bool(good)


def ad_consistency(g, g1=None, g2=None, m_max: int = 2 ** 16, schedule=None, spec: JordanSpec | None = None) -> AdConsistency:
    """Cross-check :func:`lie_limit` three ways.

    (a) ``Ad(lie_limit)`` against the Ad-level prediction; (b)
    ``Ad(|x|) = |Ad(x)|`` on ``g``, ``g2`` and ``g1 g g2`` (relative Frobenius error); (c) numeric
    iterates of ``|g1 g^m g2|^(1/m)`` up to ``m_max`` against the limit.
    Pass ``m_max=0`` to skip (c).
    """
    g = as_sl(g)
    n = g.shape[0]
    g1 = np.eye(n) if g1 is None else as_sl(g1)
    g2 = np.eye(n) if g2 is None else as_sl(g2)
    lie = lie_limit(g, g1, g2, spec=spec)
    ad_lim = _ad(lie.limit)
    pred = ad_prediction(g, g2, spec=spec).limit
    pred_err = float(np.linalg.norm(ad_lim - pred))
    mods = []
    for x in (g, g2, g1 @ g @ g2):
        ref = numlin.polar_modulus(_ad(x))
        mods.append(float(np.linalg.norm(_ad(numlin.polar_modulus(x)) - ref) / np.linalg.norm(ref)))
    report, num_err = None, float("nan")
    if m_max:
        if schedule is None:
            schedule = [m for m in (4 ** k for k in range(1, 16)) if m <= m_max]
        schedule = check_schedule(schedule)
        base = spec if spec is not None else cmjd_numeric(g)[0]
        report = iterate_limit(base, g1, g2, schedule)
        num_err = float(np.linalg.norm(report.iterates[-1] - lie.limit))
    return AdConsistency(lie, ad_lim, pred, pred_err, tuple(mods), report, num_err)


__all__ = [
    "AdConsistency",
    "CartanPolar",
    "GroupCmjd",
    "IwasawaKAN",
    "LieLimit",
    "ad",
    "ad_consistency",
    "ad_prediction",
    "ad_weights",
    "as_sl",
    "cartan_polar",
    "group_cmjd",
    "iwasawa",
    "lie_limit",
    "sl_basis",
]
