"""Extended-precision kernels for products with astronomically graded scales.

The iteration engine needs ``|F diag(exp(logs)) W|^(1/m)`` where ``logs``
spread over tens of thousands of nats (``m log gamma_j`` at ``m = 2**16``)
and ``F`` carries polynomial-in-m entries from Jordan blocks.  A single
global scale would underflow every subdominant group, so the product is
factored instead:

1. ``W = L Q`` (LQ); pushing ``diag(e^logs)`` through ``L`` only damps its
   strictly lower part because logs are sorted descending.
2. ``F L~ = Qf R``; pushing ``R`` back through the scales damps its strictly
   upper part.  Cross-cluster couplings shrink by ``exp(-gap)`` per pass.
3. Once the couplings are negligible relative to each cluster's smallest
   singular value, every cluster is an independent small SVD whose singular
   values come back as logs.

All arithmetic runs in mpmath at a caller-chosen precision, so
polynomial-in-m conditioning inside a cluster costs digits, not accuracy.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np

from .errors import NoConvergence

# logs closer than this (nats) are resolved inside one cluster
CLUSTER_GAP = 40.0
COUPLING_TOL = mpmath.mpf("1e-25")
MAX_SWEEPS = 60


def to_mp(a) -> mpmath.matrix:
    a = np.asarray(a)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    out = mpmath.matrix(a.shape[0], a.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            z = complex(a[i, j])
            out[i, j] = mpmath.mpc(z.real, z.imag)
    return out


def from_mp(A: mpmath.matrix) -> np.ndarray:
    out = np.empty((A.rows, A.cols), dtype=complex)
    for i in range(A.rows):
        for j in range(A.cols):
            out[i, j] = complex(A[i, j])
    return out


def _adj(A):
    return A.transpose_conj()


def _qr(A):
    """Thin QR with non-negative real diagonal on R."""
    Q, R = mpmath.qr(A, mode="skinny")
    for k in range(R.rows):
        d = R[k, k]
        ad = abs(d)
        if ad == 0:
            continue
        ph = d / ad
        for j in range(R.cols):
            R[k, j] = R[k, j] / ph
        for i in range(Q.rows):
            Q[i, k] = Q[i, k] * ph
        R[k, k] = ad
    return Q, R


def _sub(A, rows, cols):
    out = mpmath.matrix(len(rows), len(cols))
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            out[a, b] = A[i, j]
    return out


def _clusters(logs, gap):
    out = [[0]]
    for i in range(1, len(logs)):
        if logs[out[-1][-1]] - logs[i] > gap:
            out.append([i])
        else:
            out[-1].append(i)
    return out


def singular_values(A, dps: int) -> list:
    """Singular values of a moderately sized mp matrix, descending."""
    with mpmath.workdps(dps):
        S = mpmath.svd_c(A, compute_uv=False)
        return sorted((S[i] for i in range(len(S))), reverse=True)


def graded_root(F, logs, W, m: int, dps: int):
    """``|F diag(exp(logs)) W|^(1/m)`` and the log singular values of the product.

    Parameters
    ----------
    F : mpmath.matrix, n x r
    logs : sequence of mpf, ``-inf`` marks columns that vanish identically
    W : mpmath.matrix, r x n
    m : root order
    dps : working decimal digits (before the per-cluster widening)

    Returns
    -------
    iterate : ndarray (n, n), complex
    log_sv : ndarray (n,), descending, ``-inf`` for exact zeros
    """
    n = F.rows
    keep = [i for i, v in enumerate(logs) if v != mpmath.ninf]
    if not keep:
        return np.zeros((n, n), dtype=complex), np.full(n, -np.inf)
    with mpmath.workdps(dps):
        order = sorted(keep, key=lambda i: -logs[i])
        lg = [mpmath.mpf(logs[i]) for i in order]
        clusters = _clusters(lg, CLUSTER_GAP)
        widen = max(float(lg[c[0]] - lg[c[-1]]) for c in clusters) / math.log(10)
    with mpmath.workdps(dps + int(math.ceil(widen))):
        r = len(order)
        F1 = _sub(F, range(F.rows), order)
        Wk = _sub(W, order, range(W.cols))
        Qw, Rw = _qr(_adj(Wk))
        L = _adj(Rw)
        Qrow = _adj(Qw)
        for i in range(r):
            for j in range(i):
                L[i, j] *= mpmath.exp(lg[i] - lg[j])
        F1 = F1 * L
        for _ in range(MAX_SWEEPS):
            Qf, R = _qr(F1)
            for i in range(r):
                for j in range(i + 1, r):
                    R[i, j] *= mpmath.exp(lg[j] - lg[i])
            blocks = []
            coupled = False
            for c in clusters:
                lead = lg[c[0]]
                scale = [mpmath.exp(lg[i] - lead) for i in c]
                Bg = _sub(R, c, c)
                for a in range(len(c)):
                    for b in range(len(c)):
                        Bg[a, b] *= scale[a]
                U, S, V = mpmath.svd_c(Bg)
                smin = min(S[k] for k in range(len(S)))
                tail = [j for j in range(c[-1] + 1, r)]
                if tail:
                    coupling = max(abs(R[i, j]) * scale[a] for a, i in enumerate(c) for j in tail)
                    if coupling > COUPLING_TOL * smin:
                        coupled = True
                blocks.append((c, lead, S, V))
            if not coupled:
                break
            Q2h, R2 = _qr(_adj(R))
            L2 = _adj(R2)
            for i in range(r):
                for j in range(i):
                    L2[i, j] *= mpmath.exp(lg[i] - lg[j])
            F1 = Qf * L2
            Qrow = _adj(Q2h) * Qrow
        else:
            raise NoConvergence("graded product did not decouple")
        # right singular vectors: Qrow^* blockdiag(V_g^*)
        Vblk = mpmath.matrix(r, r)
        log_sv = []
        roots = []
        col = 0
        for c, lead, S, V in blocks:
            k = len(c)
            for a in range(k):
                for b in range(k):
                    Vblk[c[a], col + b] = mpmath.conj(V[b, a])
            for b in range(k):
                s = S[b]
                if s == 0:
                    log_sv.append(-math.inf)
                    roots.append(mpmath.mpf(0))
                else:
                    ls = mpmath.log(s) + lead
                    log_sv.append(float(ls))
                    roots.append(mpmath.exp(ls / m))
            col += k
        Vfull = from_mp(_adj(Qrow) * Vblk)
        vals = np.array([float(x) for x in roots])
    iterate = (Vfull * vals) @ Vfull.conj().T
    iterate = (iterate + iterate.conj().T) / 2
    log_sv = np.array(sorted(log_sv, reverse=True) + [-np.inf] * (n - len(log_sv)))
    return iterate, log_sv
