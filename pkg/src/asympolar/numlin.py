"""Dense matrix kernels.

Matrices are plain numpy arrays.  Real input stays real and complex input
stays complex; every factorization follows a uniqueness convention (positive
diagonals on triangular factors, descending spectra) so results are
reproducible.

The Hermitian eigensolver is cyclic complex Jacobi, the general eigensolver
is Hessenberg reduction followed by shifted QR, and the SVD is derived from
the Hermitian eigensolver applied to ``a^* a``.
"""
from __future__ import annotations

import itertools
import math
from typing import NamedTuple, Sequence

import numpy as np

from .config import get_tolerances
from .errors import (
    DefectiveOrIllConditioned,
    DimensionMismatch,
    IndexOutOfRange,
    NoConvergence,
    NotHermitian,
    NotPositiveSemidefinite,
    RankDeficient,
    SingularBase,
    SingularMatrix,
    SizeMismatch,
)

EPS = np.finfo(float).eps
JACOBI_MAX_SWEEPS = 100


class QRFactors(NamedTuple):
    Q: np.ndarray
    R: np.ndarray


class LQFactors(NamedTuple):
    L: np.ndarray
    Q: np.ndarray


class EigenH(NamedTuple):
    unitary: np.ndarray
    eigenvalues: np.ndarray


class EigenG(NamedTuple):
    V: np.ndarray
    lam: np.ndarray
    condition_estimate: float


class SVD(NamedTuple):
    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


# ----------------------------------------------------------------------------
# helpers


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float or complex array (always a copy)."""
    arr = np.array(a)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(float)
    else:
        arr = arr.astype(complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def _square(a, name="matrix") -> np.ndarray:
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def adjoint(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def _real_if_close(a, tol=0.0):
    if np.iscomplexobj(a) and max_abs(a.imag) <= tol:
        return a.real.copy()
    return a


# ----------------------------------------------------------------------------
# LU and friends


def lu(a):
    """LU with partial pivoting.

    Returns ``(lu, perm, sign)`` with unit-lower L below the diagonal of
    ``lu``, U on and above it, and ``a[perm] = L @ U``.
    """
    a = _square(a)
    n = a.shape[0]
    work = a.copy()
    perm = np.arange(n)
    sign = 1.0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(work[k:, k])))
        if p != k:
            work[[k, p]] = work[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = work[k, k]
        if pivot == 0:
            continue
        work[k + 1:, k] /= pivot
        work[k + 1:, k + 1:] -= np.outer(work[k + 1:, k], work[k, k + 1:])
    return work, perm, sign


def det(a) -> complex | float:
    work, _, sign = lu(a)
    return sign * np.prod(np.diag(work))


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by LU with partial pivoting.

    Raises ``SingularMatrix`` when a pivot falls below ``pivot_tol * max|a|``.
    """
    a = _square(a, "a")
    b = np.asarray(b)
    vector = b.ndim == 1
    b = as_matrix(b.reshape(-1, 1) if vector else b, "b")
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"cannot solve {a.shape} system with right-hand side {b.shape}")
    scale = max_abs(a)
    work, perm, _ = lu(a)
    piv = np.abs(np.diag(work))
    if scale == 0 or np.min(piv) <= get_tolerances().pivot_tol * scale:
        raise SingularMatrix(f"matrix is singular to working precision (min pivot {np.min(piv):.3e})")
    dtype = np.result_type(work, b)
    x = b[perm].astype(dtype)
    for k in range(n):
        x[k + 1:] -= np.outer(work[k + 1:, k], x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - work[k, k + 1:] @ x[k + 1:]) / work[k, k]
    return x[:, 0] if vector else x


def inv(a) -> np.ndarray:
    a = _square(a)
    return solve(a, np.eye(a.shape[0], dtype=a.dtype))


def arithmetic(a, b=None, kind: str = "mul"):
    """Elementary operations: add, sub, mul, adjoint, scale, solve.

    For ``scale`` the second argument is a scalar; ``adjoint`` ignores it.
    """
    a = as_matrix(a, "a")
    if kind == "adjoint":
        return adjoint(a)
    if kind == "scale":
        return a * b
    if kind == "solve":
        return solve(a, b)
    b = as_matrix(b, "b")
    if kind in ("add", "sub"):
        if a.shape != b.shape:
            raise DimensionMismatch(f"cannot {kind} shapes {a.shape} and {b.shape}")
        return a + b if kind == "add" else a - b
    if kind == "mul":
        if a.shape[1] != b.shape[0]:
            raise DimensionMismatch(f"cannot multiply shapes {a.shape} and {b.shape}")
        return a @ b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


# ----------------------------------------------------------------------------
# QR / LQ


def _householder_qr(a):
    """Full Householder QR without any checks: ``a = Q R`` with Q square."""
    R = np.array(a, dtype=np.result_type(a, float))
    m, n = R.shape
    Q = np.eye(m, dtype=R.dtype)
    for k in range(min(m - 1, n)):
        x = R[k:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        R[k:, k:] -= 2.0 * np.outer(v, np.conj(v) @ R[k:, k:])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, np.conj(v))
        R[k + 1:, k] = 0.0
    return Q, R


def qr(a) -> QRFactors:
    """Thin QR with a real positive diagonal on R.

    ``a`` must have at least as many rows as columns and full column rank
    (``|R_kk| > rank_tol * max|a|``).
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        raise DimensionMismatch(f"qr needs rows >= cols, got {a.shape}")
    Q, R = _householder_qr(a)
    Q, R = Q[:, :n], R[:n, :]
    d = np.diag(R).copy()
    scale = max_abs(a)
    if scale == 0 or np.min(np.abs(d)) <= get_tolerances().rank_tol * scale:
        raise RankDeficient("matrix does not have full column rank")
    phase = d / np.abs(d)
    R = np.conj(phase)[:, None] * R
    Q = Q * phase[None, :]
    R[np.diag_indices(n)] = np.abs(d)
    return QRFactors(Q, np.triu(R))


def lq(a) -> LQFactors:
    """``a = L Q`` with L lower triangular (positive diagonal) and Q unitary."""
    a = _square(a, "a")
    Q1, R1 = qr(adjoint(a))
    return LQFactors(adjoint(R1), adjoint(Q1))


# ----------------------------------------------------------------------------
# Hermitian eigenproblem


def as_hermitian(a, tol: float | None = None) -> np.ndarray:
    """Validate Hermitian input and return its exactly Hermitian part."""
    a = _square(a)
    tol = get_tolerances().herm_tol if tol is None else tol
    defect = max_abs(a - adjoint(a))
    if defect > tol * max(max_abs(a), np.finfo(float).tiny):
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds tolerance")
    return (a + adjoint(a)) / 2


def as_psd(a, tol: float | None = None) -> np.ndarray:
    """Validate positive semidefinite input, clamping tiny negative eigenvalues."""
    h = as_hermitian(a)
    tol = get_tolerances().psd_tol if tol is None else tol
    eig = eigh(h)
    floor = -tol * max(max_abs(h), np.finfo(float).tiny)
    if eig.eigenvalues[-1] < floor:
        raise NotPositiveSemidefinite(f"min eigenvalue {eig.eigenvalues[-1]:.3e} is negative")
    if eig.eigenvalues[-1] < 0:
        lam = np.clip(eig.eigenvalues, 0.0, None)
        h = (eig.unitary * lam) @ adjoint(eig.unitary)
        h = (h + adjoint(h)) / 2
    return h


def _off_norm(a) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0)
    return float(np.linalg.norm(off))


def eigh(a) -> EigenH:
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back real and descending; columns of ``unitary`` are
    the matching eigenvectors.
    """
    work = np.array(as_hermitian(a))
    n = work.shape[0]
    V = np.eye(n, dtype=work.dtype)
    scale = float(np.linalg.norm(work))
    target = 1e-14 * scale
    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_norm(work) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                b = work[p, q]
                mag = abs(b)
                if mag == 0.0:
                    continue
                app, aqq = work[p, p].real, work[q, q].real
                if mag < EPS * 1e-2 * math.sqrt(abs(app * aqq)):
                    work[p, q] = work[q, p] = 0.0
                    continue
                tau = (aqq - app) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = np.conj(b) / mag  # e^{-i arg b}
                # W = diag(1, ph) @ [[c, s], [-s, c]]
                W = np.array([[c, s], [-s * ph, c * ph]], dtype=work.dtype)
                idx = [p, q]
                work[:, idx] = work[:, idx] @ W
                work[idx, :] = adjoint(W) @ work[idx, :]
                V[:, idx] = V[:, idx] @ W
                work[p, q] = work[q, p] = 0.0
                work[p, p] = work[p, p].real
                work[q, q] = work[q, q].real
    else:
        if _off_norm(work) > target:
            raise NoConvergence("Jacobi sweep limit exceeded")
    lam = np.real(np.diag(work)).copy()
    order = np.argsort(-lam, kind="stable")
    return EigenH(V[:, order], lam[order])


# ----------------------------------------------------------------------------
# general eigenproblem


def _hessenberg(a):
    H = np.array(a, dtype=complex)
    n = H.shape[0]
    Z = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, np.conj(v) @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, np.conj(v))
        Z[:, k + 1:] -= 2.0 * np.outer(Z[:, k + 1:] @ v, np.conj(v))
        H[k + 2:, k] = 0.0
    return H, Z


def _wilkinson_shift(a, b, c, d):
    tr = a + d
    disc = np.sqrt((a - d) ** 2 / 4 + b * c)
    mu1 = tr / 2 + disc
    mu2 = tr / 2 - disc
    return mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2


def schur(a):
    """Complex Schur form ``a = Z T Z^*`` by Hessenberg reduction and shifted QR."""
    a = _square(a)
    n = a.shape[0]
    T, Z = _hessenberg(a)
    if n == 1:
        return T, Z
    hi = n - 1
    its = 0
    total = 0
    while hi > 0:
        lo = 0
        for l in range(hi, 0, -1):
            if abs(T[l, l - 1]) <= EPS * (abs(T[l, l]) + abs(T[l - 1, l - 1])):
                T[l, l - 1] = 0.0
                lo = l
                break
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if total > 60 * n:
            raise NoConvergence("shifted QR iteration did not converge")
        if its % 11 == 0:
            shift = T[hi, hi] + abs(T[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            shift = _wilkinson_shift(T[hi - 1, hi - 1], T[hi - 1, hi], T[hi, hi - 1], T[hi, hi])
        w = slice(lo, hi + 1)
        k = hi + 1 - lo
        Qw, Rw = _householder_qr(T[w, w] - shift * np.eye(k))
        T[w, w] = np.triu(Rw @ Qw + shift * np.eye(k), -1)
        T[:lo, w] = T[:lo, w] @ Qw
        T[w, hi + 1:] = adjoint(Qw) @ T[w, hi + 1:]
        Z[:, w] = Z[:, w] @ Qw
    return np.triu(T), Z


def _argument(z, tol):
    ang = math.atan2(z.imag, z.real) % (2 * math.pi)
    if ang > 2 * math.pi - tol:
        ang = 0.0
    return ang


def order_eigenvalues(lam, group_tol: float | None = None) -> np.ndarray:
    """Permutation ordering ``lam`` by modulus (descending), ties by argument then index."""
    tol = get_tolerances()
    group_tol = tol.group_tol if group_tol is None else group_tol
    lam = np.asarray(lam, dtype=complex)
    by_mod = sorted(range(len(lam)), key=lambda i: (-abs(lam[i]), i))
    out = []
    cluster = []
    for i in by_mod:
        if cluster and not _same_modulus(abs(lam[cluster[0]]), abs(lam[i]), group_tol, tol.abs_floor):
            out.extend(sorted(cluster, key=lambda j: (_argument(lam[j], group_tol), j)))
            cluster = []
        cluster.append(i)
    out.extend(sorted(cluster, key=lambda j: (_argument(lam[j], group_tol), j)))
    return np.array(out, dtype=int)


def _same_modulus(big, small, group_tol, abs_floor):
    if big <= abs_floor:
        return small <= abs_floor
    if small <= abs_floor:
        return False
    return small / big > 1.0 - group_tol


def eig_general(a, cond_max: float | None = None) -> EigenG:
    """Eigenvalues and eigenvectors of a diagonalizable matrix.

    Eigenvectors are obtained by back substitution on the Schur factor
    (one exact-shift inverse-iteration step per eigenvalue) and normalized to
    unit length.  Raises ``DefectiveOrIllConditioned`` when the eigenvector
    matrix condition number exceeds ``cond_max``.
    """
    a = _square(a)
    cond_max = get_tolerances().cond_max if cond_max is None else cond_max
    n = a.shape[0]
    T, Z = schur(a)
    lam = np.diag(T).copy()
    smin = max(EPS * max_abs(T), np.finfo(float).tiny)
    Y = np.zeros((n, n), dtype=complex)
    for k in range(n):
        y = np.zeros(n, dtype=complex)
        y[k] = 1.0
        for i in range(k - 1, -1, -1):
            denom = T[i, i] - lam[k]
            if abs(denom) < smin:
                denom = smin
            y[i] = -(T[i, i + 1:k + 1] @ y[i + 1:k + 1]) / denom
        Y[:, k] = y / np.linalg.norm(y)
    V = Z @ Y
    V /= np.linalg.norm(V, axis=0)
    order = order_eigenvalues(lam)
    V, lam = V[:, order], lam[order]
    try:
        cond = cond2(V)
    except SingularMatrix:
        cond = math.inf
    if not cond <= cond_max:
        raise DefectiveOrIllConditioned(
            f"eigenvector matrix condition {cond:.3e} exceeds {cond_max:.1e}; supply a JordanSpec"
        )
    if not np.iscomplexobj(a) or max_abs(a.imag) == 0:
        # real input: snap numerically real eigenvalues
        lam = np.where(np.abs(lam.imag) <= 1e-14 * max(1.0, max_abs(lam)), lam.real, lam)
    return EigenG(V, lam.astype(complex), cond)


# ----------------------------------------------------------------------------
# SVD and derived quantities


def _complete_orthonormal(U, k):
    """Fill columns k.. of U with an orthonormal completion of columns :k."""
    m = U.shape[0]
    candidates = itertools.chain(range(m))
    col = k
    for e in candidates:
        if col >= U.shape[1]:
            break
        v = np.zeros(m, dtype=U.dtype)
        v[e] = 1.0
        for _ in range(2):
            v -= U[:, :col] @ (adjoint(U[:, :col]) @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            U[:, col] = v / nv
            col += 1
    return U


def svd(a) -> SVD:
    """Thin SVD ``a = U diag(S) V^*`` via the eigen-decomposition of ``a^* a``."""
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        U, S, V = svd(adjoint(a))
        return SVD(V, S, U)
    gram = adjoint(a) @ a
    eig = eigh((gram + adjoint(gram)) / 2)
    S = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    V = eig.unitary
    U = np.zeros((m, n), dtype=np.result_type(a, V))
    cutoff = (S[0] if n else 0.0) * n * EPS * 16
    k = 0
    for j in range(n):
        if S[j] <= cutoff or S[j] == 0:
            break
        u = a @ V[:, j] / S[j]
        # re-orthogonalize against the better-determined leading columns
        u -= U[:, :k] @ (adjoint(U[:, :k]) @ u)
        U[:, k] = u / np.linalg.norm(u)
        k += 1
    _complete_orthonormal(U, k)
    return SVD(U, S, V)


def singular_values(a) -> np.ndarray:
    return svd(a).S


def norm2(a) -> float:
    """Spectral norm from the largest eigenvalue of ``a^* a``."""
    a = as_matrix(a)
    gram = adjoint(a) @ a
    return math.sqrt(max(eigh((gram + adjoint(gram)) / 2).eigenvalues[0], 0.0))


def cond2(a) -> float:
    """Spectral condition number ``|a| |a^{-1}|`` (inverse by LU)."""
    a = _square(a)
    return norm2(a) * norm2(inv(a))


def psd_power(a, r: float) -> np.ndarray:
    """Fractional power of a PSD matrix through its eigen-decomposition."""
    a = as_psd(a)
    eig = eigh(a)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    if r <= 0:
        if np.any(lam <= 0):
            raise SingularBase(f"power {r} of a singular PSD matrix")
        powered = lam ** r
    else:
        powered = np.where(lam > 0, lam, 0.0) ** r
    out = (eig.unitary * powered) @ adjoint(eig.unitary)
    return (out + adjoint(out)) / 2


def polar_modulus(a) -> np.ndarray:
    """``|a| = (a^* a)^{1/2}``."""
    a = as_matrix(a)
    gram = adjoint(a) @ a
    return psd_power((gram + adjoint(gram)) / 2, 0.5)


def loewner_leq(a, b, tol: float = 1e-9) -> bool:
    """True when ``b - a`` is positive semidefinite up to ``tol``."""
    a = as_hermitian(a)
    b = as_hermitian(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return bool(eigh(b - a).eigenvalues[-1] >= -tol)


def minor_det(a, rows: Sequence[int], cols: Sequence[int]):
    """Determinant of the submatrix ``a[rows, cols]``."""
    a = as_matrix(a)
    rows = list(rows)
    cols = list(cols)
    if len(rows) != len(cols):
        raise SizeMismatch(f"{len(rows)} rows but {len(cols)} columns selected")
    if len(rows) == 0:
        return 1.0
    m, n = a.shape
    if any(not 0 <= i < m for i in rows) or any(not 0 <= j < n for j in cols):
        raise IndexOutOfRange("minor index out of range")
    return det(a[np.ix_(rows, cols)])


__all__ = [
    "EPS",
    "EigenG",
    "EigenH",
    "LQFactors",
    "QRFactors",
    "SVD",
    "adjoint",
    "arithmetic",
    "as_hermitian",
    "as_matrix",
    "as_psd",
    "cond2",
    "det",
    "eig_general",
    "eigh",
    "inv",
    "loewner_leq",
    "lq",
    "lu",
    "max_abs",
    "minor_det",
    "norm2",
    "order_eigenvalues",
    "polar_modulus",
    "psd_power",
    "qr",
    "schur",
    "singular_values",
    "solve",
    "svd",
]
