"""Acceptance suites: the standard 20-case problem set and the nine criteria.

Every criterion returns a :class:`CriterionResult`; ``run_all`` drives them
for the ``selftest`` command and for the test suite.  ``fast=True`` stops
schedules at ``m = 2**10`` and only checks that errors decay.
"""
from __future__ import annotations

import contextlib
import io
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import lemmas, liebridge, numlin
from .asymlimit import (
    diag_lower_limit,
    growth_exponent,
    iterate_limit,
    nayak_projections,
    perturbed_limit_property,
    predicted_limit_right,
)
from .errors import AmbiguousClassification
from .jordan import JordanSpec

FULL_SCHEDULE = tuple(4 ** k for k in range(1, 9))  # ends at 2**16, contains 2**12
FAST_SCHEDULE = tuple(4 ** k for k in range(1, 6))  # ends at 2**10
LIMIT_TOL = 3e-3


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.detail}; {self.seconds:.2f}s)"


@dataclass(frozen=True, eq=False)
class Case:
    name: str
    family: str
    spec: JordanSpec
    B: np.ndarray
    C: np.ndarray


def _well_conditioned(rng, n, complex_=False, cond_max=30.0):
    while True:
        x = rng.normal(size=(n, n))
        if complex_:
            x = x + 1j * rng.normal(size=(n, n))
        if numlin.cond2(x) < cond_max:
            return x


def _similarity(rng, n):
    return np.eye(n) + 0.4 * rng.normal(size=(n, n))


_FAMILIES = {
    "diagonal": [
        [(3, 1), (1, 1)],
        [(2, 1), (-2, 1), (0.5, 1)],
        [(1.5, 1), (1.5j, 1), (0.25, 1)],
        [(-4, 1), (1, 1), (0.5, 1)],
    ],
    "defective-2x2": [
        [(2, 2)],
        [(0.5 + 0.5j, 2)],
        [(-1, 2)],
    ],
    "defective-3x3": [
        [(1.3, 3)],
        [(2, 2), (1, 1)],
        [(1, 1), (0.5, 2)],
        [(1j, 2), (-1, 1)],
        [(3, 1), (-3, 2)],
    ],
    "complex-elliptic": [
        [(np.exp(1j * np.pi / 3), 1), (np.exp(-1j * np.pi / 3), 1)],
        [(2 * np.exp(0.7j), 1), (2 * np.exp(-0.7j), 1), (0.5, 1)],
        [(1j, 1), (-1, 1), (1, 1)],
        [(np.exp(0.4j), 2), (0.6, 1)],
    ],
    "singular-nilpotent-mixed": [
        [(0, 2), (2, 1)],
        [(1.5, 2), (0, 1)],
        [(1, 1), (0, 3)],
        [(1j, 1), (-1, 1), (0, 2)],
    ],
}


def standard_suite(seed: int = 42) -> list[Case]:
    """Twenty fixed problems, each with its own similarity and random ``B``, ``C``."""
    rng = np.random.default_rng(seed)
    out = []
    for family, block_lists in _FAMILIES.items():
        for i, blocks in enumerate(block_lists):
            n = sum(s for _, s in blocks)
            spec = JordanSpec(_similarity(rng, n), tuple(blocks))
            B = _well_conditioned(rng, n)
            C = _well_conditioned(rng, n)
            out.append(Case(f"{family}-{i}", family, spec, B, C))
    return out


def random_sl(rng, n, min_ratio=1.2):
    """Random element of ``SL_n(R)`` whose distinct eigenvalue moduli differ by ``min_ratio``."""
    while True:
        x = rng.normal(size=(n, n))
        d = np.linalg.det(x)
        if abs(d) < 0.05:
            continue
        if d < 0:
            x[:, 0] = -x[:, 0]
        x = x / abs(d) ** (1.0 / n)
        mod = np.sort(np.abs(np.linalg.eigvals(x)))[::-1]
        ratios = mod[:-1] / mod[1:]
        distinct = ratios[ratios > 1 + 1e-9]
        if np.all((ratios < 1 + 1e-9) | (ratios > min_ratio)) and distinct.size:
            return x


def _timed(number, name, fn) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # report, never crash the table
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


def criterion_closed_form():
    spec = JordanSpec(np.array([[1.0, 1.0], [0.0, -1.0]]), ((2, 1), (1, 1)))
    C = np.array([[1.0, 0.0], [1.0, 1.0]])
    want_c = np.array([[1.8, 0.4], [0.4, 1.2]])
    want_i = np.array([[1.5, 0.5], [0.5, 1.5]])
    err_c = numlin.max_abs(predicted_limit_right(spec, C).limit - want_c)
    err_i = numlin.max_abs(predicted_limit_right(spec, np.eye(2)).limit - want_i)
    reps = 200
    timings = []
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(reps):
            predicted_limit_right(spec, C)
        timings.append((time.perf_counter() - t0) / reps)
    per_call = min(timings)
    ok = err_c <= 1e-12 and err_i <= 1e-12 and per_call < 1e-3
    return ok, f"errors {err_c:.1e}, {err_i:.1e}; {per_call * 1e3:.3f} ms per call"


def _suite_reports(suite, schedule):
    return [iterate_limit(c.spec, c.B, c.C, schedule) for c in suite]


def criterion_convergence(suite, schedule, reports=None):
    reports = reports or _suite_reports(suite, schedule)
    worst, bad = 0.0, []
    fast = schedule[-1] < 2 ** 16
    for case, rep in zip(suite, reports):
        final = rep.frob_errors[-1]
        worst = max(worst, final)
        if fast:
            ok = rep.tail_decreasing(3) or final < 1e-12
        else:
            i12 = rep.schedule.index(2 ** 12)
            ok = final <= LIMIT_TOL and (final < rep.frob_errors[i12] or final < 1e-13)
        if not ok:
            bad.append(case.name)
    detail = f"worst final frob error {worst:.2e} at m={schedule[-1]}"
    if bad:
        detail += f"; failing {bad}"
    return not bad, detail


def criterion_yamamoto(suite, schedule, reports=None):
    reports = reports or _suite_reports(suite, schedule)
    finals = [rep.sv_errors[-1] for rep in reports]
    fast = schedule[-1] < 2 ** 16
    if fast:
        ok = all(r.sv_errors[-1] <= r.sv_errors[-3] or r.sv_errors[-1] < 1e-12 for r in reports)
    else:
        ok = max(finals) <= LIMIT_TOL
    return ok, f"worst singular-value error {max(finals):.2e} at m={schedule[-1]}"


def criterion_b_independence(suite, schedule, seed):
    rng = np.random.default_rng(seed + 1)
    worst_iter, worst_pred = 0.0, 0.0
    m = (schedule[-1],)
    for case in suite:
        n = case.spec.n
        B1, B2 = _well_conditioned(rng, n), _well_conditioned(rng, n)
        r1 = iterate_limit(case.spec, B1, case.C, m)
        r2 = iterate_limit(case.spec, B2, case.C, m)
        worst_iter = max(worst_iter, np.linalg.norm(r1.iterates[-1] - r2.iterates[-1]))
        p1 = predicted_limit_right(case.spec, case.C).limit
        p2 = predicted_limit_right(case.spec, case.C).limit
        worst_pred = max(worst_pred, numlin.max_abs(p1 - p2))
    bound = 2 * LIMIT_TOL if schedule[-1] >= 2 ** 16 else math.inf
    ok = worst_iter <= bound and worst_pred <= 1e-12
    return ok, f"iterate gap {worst_iter:.2e}, predicted gap {worst_pred:.1e}"


def criterion_m_independence(suite, seed):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for case in suite:
        spec = case.spec
        _, mults = spec.groups
        R = np.zeros((spec.n, spec.n), dtype=complex)
        start = 0
        for k in mults:
            R[start:start + k, start:start + k] = _well_conditioned(rng, k, complex_=True)
            start += k
        other = JordanSpec(spec.M @ R, spec.blocks)
        a = predicted_limit_right(spec, case.C).limit
        b = predicted_limit_right(other, case.C).limit
        worst = max(worst, numlin.max_abs(a - b))
    return worst <= 1e-9, f"max change {worst:.1e}"


def criterion_nayak(suite, seed, schedule):
    rng = np.random.default_rng(seed + 3)
    recon_err, proj_err, mismatches, total = 0.0, 0.0, 0, 0
    for case in suite:
        spec = case.spec
        nay = nayak_projections(spec)
        pred = predicted_limit_right(spec, np.eye(spec.n)).limit
        recon_err = max(recon_err, numlin.max_abs(nay.reconstruction - pred))
        _, mults = spec.groups
        for j, E in enumerate(nay.projections, start=1):
            nxt = nay.E(j + 1)
            proj_err = max(
                proj_err,
                numlin.max_abs(E @ E - E),
                numlin.max_abs(E - numlin.adjoint(E)),
                numlin.max_abs(E @ nxt - nxt),
                abs(np.trace(E).real - sum(mults[j - 1:])),
            )
    per_case = 5
    for case in suite:
        spec = case.spec
        nay = nayak_projections(spec)
        s = len(nay.projections)
        for _ in range(per_case):
            j = int(rng.integers(1, s + 1))
            y = rng.normal(size=spec.n) + 1j * rng.normal(size=spec.n)
            x = nay.E(j) @ y
            total += 1
            try:
                res = growth_exponent(spec, x, schedule)
            except AmbiguousClassification:
                mismatches += 1
                continue
            if res.classified_j != j:
                mismatches += 1
    ok = recon_err <= 1e-10 and proj_err <= 1e-9 and mismatches == 0
    return ok, (
        f"reconstruction {recon_err:.1e}, projector defect {proj_err:.1e}, "
        f"{mismatches}/{total} classification mismatches"
    )


def criterion_lemmas(suite, seed, schedule):
    rng = np.random.default_rng(seed + 4)
    fast = schedule[-1] < 2 ** 16
    failures = []
    # Loewner monotonicity of roots
    for _ in range(50):
        n = int(rng.integers(2, 5))
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        Y = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        a = X @ numlin.adjoint(X)
        b = a + Y @ numlin.adjoint(Y)
        m = int(rng.integers(1, 7))
        if not lemmas.monotone_root_property(a, b, m, 1e-9):
            failures.append("loewner")
            break
    cb, um = 0.0, 0.0
    for _ in range(20):
        n = int(rng.integers(1, 6))
        p = int(rng.integers(1, n + 1))
        A = rng.normal(size=(p, n)) + 1j * rng.normal(size=(p, n))
        B = rng.normal(size=(n, p)) + 1j * rng.normal(size=(n, p))
        cb = max(cb, lemmas.cauchy_binet(A, B).defect)
        U, _ = numlin.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        um = max(um, lemmas.unitary_minor_sum(U, p).defect)
    if cb > 1e-9:
        failures.append("cauchy-binet")
    if um > 1e-9:
        failures.append("unitary-minor")
    dl = diag_lower_limit([2.0, 1.0], [[1.0, 0.0], [1.0, 1.0]], schedule)
    dl_ok = dl.tail_decreasing(3) or dl.frob_errors[-1] < 1e-12 if fast else dl.frob_errors[-1] <= LIMIT_TOL
    if not dl_ok:
        failures.append("diag-lower")
    worst = 0.0
    for case in suite:
        rep = perturbed_limit_property("elliptic-unipotent", case.spec, (schedule[-1],))
        worst = max(worst, abs(rep.s_max_roots[-1] - 1), abs(rep.s_min_roots[-1] - 1))
    if not fast and worst > 1e-3:
        failures.append("perturbed")
    detail = (
        f"loewner {'ok' if 'loewner' not in failures else 'violated'} on 50 pairs, cauchy-binet {cb:.1e}, unitary minors {um:.1e}, diag-lower {dl.frob_errors[-1]:.1e}, "
        f"max |s^(1/m) - 1| {worst:.1e}"
    )
    if failures:
        detail += f"; failing {failures}"
    return not failures, detail


def criterion_lie(seed, schedule, count=10):
    rng = np.random.default_rng(seed + 5)
    pred, numeric, mods, rt = 0.0, 0.0, 0.0, 0.0
    fast = schedule[-1] < 2 ** 16
    decay_ok = True
    for n in (2, 3):
        for _ in range(count):
            g, g1, g2 = random_sl(rng, n), random_sl(rng, n), random_sl(rng, n)
            rep = liebridge.ad_consistency(g, g1, g2, schedule=schedule)
            pred = max(pred, rep.predicted_error)
            mods = max(mods, max(rep.modulus_errors))
            numeric = max(numeric, rep.numeric_error)
            if fast:
                decay_ok = decay_ok and rep.report.tail_decreasing(3)
            for x in (g, g1, g2):
                k, a, nf = liebridge.iwasawa(x)
                kc, p = liebridge.cartan_polar(x)
                rt = max(
                    rt,
                    numlin.max_abs(k @ a @ nf - x),
                    numlin.max_abs(k.T @ k - np.eye(n)),
                    numlin.max_abs(kc @ p - x),
                    numlin.max_abs(kc.T @ kc - np.eye(n)),
                )
    ok = pred <= 1e-7 and mods <= 1e-7 and rt <= 1e-10 and (decay_ok if fast else numeric <= LIMIT_TOL)
    return ok, (
        f"Ad-level gap {pred:.1e}, Ad(|x|) gap {mods:.1e}, numeric gap {numeric:.1e}, "
        f"round-trips {rt:.1e}"
    )


def criterion_determinism(seed, schedule):
    from .cli import main  # deferred: cli imports this module
    from .serialization import dump_json, spec_to_json

    spec = JordanSpec(np.array([[1.0, 1.0], [0.0, -1.0]]), ((2, 1), (1, 1)))
    sched = f"{schedule[0]}:4:{schedule[-1]}"
    outputs = []
    with tempfile.TemporaryDirectory() as tmp:
        a = Path(tmp) / "a.json"
        dump_json(spec_to_json(spec), a)
        for run in range(2):
            out = Path(tmp) / f"run{run}.csv"
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                code = main(["iterate", str(a), "--random-bc", "--seed", str(seed),
                             "--schedule", sched, "--out", str(out)])
            if code != 0:
                return False, f"iterate exited with {code}"
            outputs.append(out.read_bytes())
    same = outputs[0] == outputs[1]
    return same, f"{len(outputs[0])} bytes, identical={same}"


SUITE_NAMES = (
    "closed-form",
    "convergence",
    "yamamoto",
    "b-independence",
    "m-independence",
    "nayak",
    "lemmas",
    "cauchy-binet",
    "lie",
    "determinism",
)


def run_all(fast: bool = False, seed: int = 42, only: str | None = None,
            report: Callable[[CriterionResult], None] | None = None) -> list[CriterionResult]:
    """Run every criterion (or the one named by ``only``) and return the results in order."""
    if only is not None and only not in SUITE_NAMES:
        raise ValueError(f"unknown suite {only!r}; choose from {', '.join(SUITE_NAMES)}")
    schedule = FAST_SCHEDULE if fast else FULL_SCHEDULE
    suite = standard_suite(seed)
    cache: dict = {}

    def reports():
        if "r" not in cache:
            cache["r"] = _suite_reports(suite, schedule)
        return cache["r"]

    plan = [
        (1, "closed-form", "closed-form limit", criterion_closed_form),
        (2, "convergence", "convergence on the 20-case suite", lambda: criterion_convergence(suite, schedule, reports())),
        (3, "yamamoto", "singular values of iterates", lambda: criterion_yamamoto(suite, schedule, reports())),
        (4, "b-independence", "independence of B", lambda: criterion_b_independence(suite, schedule, seed)),
        (5, "m-independence", "independence of M", lambda: criterion_m_independence(suite, seed)),
        (6, "nayak", "projections and growth classification", lambda: criterion_nayak(suite, seed, schedule)),
        (7, "lemmas", "lemma suites", lambda: criterion_lemmas(suite, seed, schedule)),
        (8, "lie", "SL_n bridge", lambda: criterion_lie(seed, schedule)),
        (9, "determinism", "byte-identical CSV", lambda: criterion_determinism(seed, schedule)),
    ]
    if only == "cauchy-binet":
        plan = [(7, "cauchy-binet", "Cauchy-Binet and unitary minors", _cauchy_binet_only(seed))]
    elif only is not None:
        plan = [p for p in plan if p[1] == only]
    results = []
    for number, _, title, fn in plan:
        res = _timed(number, title, fn)
        results.append(res)
        if report is not None:
            report(res)
    return results


def _cauchy_binet_only(seed):
    def run():
        rng = np.random.default_rng(seed + 4)
        cb, um = 0.0, 0.0
        for _ in range(50):
            n = int(rng.integers(1, 6))
            p = int(rng.integers(1, n + 1))
            A = rng.normal(size=(p, n)) + 1j * rng.normal(size=(p, n))
            B = rng.normal(size=(n, p)) + 1j * rng.normal(size=(n, p))
            cb = max(cb, lemmas.cauchy_binet(A, B).defect)
            U, _ = numlin.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            um = max(um, lemmas.unitary_minor_sum(U, p).defect)
        return cb <= 1e-9 and um <= 1e-9, f"cauchy-binet {cb:.1e}, unitary minors {um:.1e}"

    return run


__all__ = [
    "Case",
    "CriterionResult",
    "FAST_SCHEDULE",
    "FULL_SCHEDULE",
    "SUITE_NAMES",
    "random_sl",
    "run_all",
    "standard_suite",
]
