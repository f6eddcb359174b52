"""Independent reference computations used as oracles.

Everything here goes through numpy.linalg or mpmath directly, never through
the package kernels under test.
"""
import math

import mpmath
import numpy as np


def mp_matrix(a):
    a = np.asarray(a, dtype=complex)
    out = mpmath.matrix(a.shape[0], a.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i, j] = mpmath.mpc(a[i, j].real, a[i, j].imag)
    return out


def np_matrix(A):
    return np.array([[complex(A[i, j]) for j in range(A.cols)] for i in range(A.rows)])


def mp_assemble(M, blocks):
    """``M J M^{-1}`` in working precision from float inputs."""
    n = sum(s for _, s in blocks)
    J = mpmath.zeros(n, n)
    k = 0
    for mu, s in blocks:
        for i in range(s):
            J[k + i, k + i] = mpmath.mpc(complex(mu).real, complex(mu).imag)
            if i + 1 < s:
                J[k + i, k + i + 1] = 1
        k += s
    Mm = mp_matrix(M)
    return Mm * J * mpmath.inverse(Mm)


def auto_digits(blocks, m, extra=100):
    """Digits that resolve every singular value of ``A^m`` against the largest."""
    mods = [abs(complex(mu)) for mu, _ in blocks if abs(complex(mu)) > 0]
    spread = math.log10(max(mods) / min(mods)) if mods else 0.0
    tmax = max(s for _, s in blocks)
    return int(2 * m * spread + 4 * tmax * math.log10(m + 1)) + extra


def brute_root(M, blocks, B, C, m, dps=None, side="right"):
    """``|B A^m C|^(1/m)`` (or the left modulus) by explicit powering and SVD."""
    dps = auto_digits(blocks, m) if dps is None else dps
    with mpmath.workdps(dps):
        A = mp_assemble(M, blocks)
        X = mp_matrix(B) * (A ** m) * mp_matrix(C)
        if side == "left":
            X = X.transpose_conj()
        U, S, V = mpmath.svd_c(X)
        n = X.rows
        Vh = V.transpose_conj()
        smax = max(S[k] for k in range(n))
        floor = smax * mpmath.mpf(10) ** (-dps // 2)
        out = mpmath.zeros(n, n)
        for k in range(n):
            s = S[k]
            r = mpmath.exp(mpmath.log(s) / m) if s > floor else 0
            for i in range(n):
                for j in range(n):
                    out[i, j] += Vh[i, k] * r * mpmath.conj(Vh[j, k])
        return np_matrix(out)


def reference_limit_right(M, D, C):
    """``Q^* D Q`` from ``M^{-1} C = L Q`` via numpy's QR of the adjoint."""
    X = np.linalg.solve(M, C)
    q, r = np.linalg.qr(X.conj().T)
    ph = np.diag(r) / np.abs(np.diag(r))
    q = q * ph
    Q = q.conj().T
    return Q.conj().T @ np.diag(D) @ Q


def psd_sqrt(a):
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
