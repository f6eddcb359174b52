"""Command-line entry point: ``asympolar {predict,iterate,classify,lie,selftest}``.

Exit codes: 0 success, 1 a check ran but missed its tolerance, 2 unreadable
input or bad flags, 3 a mathematical precondition failed, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import acceptance, liebridge, numlin
from .asymlimit import (
    check_schedule,
    growth_exponent,
    iterate_limit,
    predicted_limit_left,
    predicted_limit_right,
)
from .config import overrides_from_env, set_tolerances
from .errors import AsymPolarError, ParseError
from .jordan import JordanSpec, cmjd_numeric
from .serialization import LoadedInput, dump_json, load_input, matrix_to_json

MAX_M = 2 ** 30


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def parse_schedule(text: str) -> tuple:
    """``start:factor:max`` to the geometric schedule ``start, start*factor, ... <= max``."""
    try:
        start, factor, top = (int(part) for part in text.split(":"))
    except ValueError as exc:
        raise ParseError(f"schedule must be start:factor:max with integers, got {text!r}") from exc
    if start < 1 or factor < 2 or top < start or top > MAX_M:
        raise ParseError("schedule needs start >= 1, factor >= 2, start <= max <= 2**30")
    out, m = [], start
    while m <= top:
        out.append(m)
        m *= factor
    return tuple(out)


def parse_vector(text: str) -> np.ndarray:
    try:
        vals = [complex(part.strip().replace("i", "j")) for part in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"cannot parse vector {text!r}") from exc
    vec = np.array(vals)
    return vec.real.copy() if not np.any(vec.imag) else vec


def _as_spec(loaded: LoadedInput) -> JordanSpec:
    if loaded.spec is not None:
        return loaded.spec
    return cmjd_numeric(loaded.matrix)[0]


def _as_matrix(loaded: LoadedInput, name: str) -> np.ndarray:
    if loaded.matrix is None:
        raise ParseError(f"{name} must be a plain matrix, not a Jordan spec")
    return loaded.matrix


def _identity_or(path, n, name):
    if path is None:
        return np.eye(n)
    return _as_matrix(load_input(path), name)


def _random_factor(rng, n):
    while True:
        x = rng.normal(size=(n, n))
        if numlin.cond2(x) < 30.0:
            return x


def cmd_predict(args) -> int:
    spec = _as_spec(load_input(args.a))
    if args.side == "right":
        C = _identity_or(args.c, spec.n, "C")
        res = predicted_limit_right(spec, C)
    else:
        B = _identity_or(args.b, spec.n, "B")
        res = predicted_limit_left(spec, B)
    limit = res.limit
    if numlin.max_abs(limit.imag) <= 1e-12 * max(numlin.max_abs(limit), 1.0):
        limit = limit.real
    out = {
        "side": res.side,
        "limit": matrix_to_json(limit),
        "Q": matrix_to_json(res.Q),
        "D": [float(v) for v in res.D],
        "gammas": [float(v) for v in res.gammas],
        "multiplicities": list(res.multiplicities),
    }
    text = dump_json(out, args.out)
    if args.out is None:
        print(text)
    return 0


def cmd_iterate(args) -> int:
    spec = _as_spec(load_input(args.a))
    n = spec.n
    rng = np.random.default_rng(args.seed)
    if args.random_bc:
        B = _random_factor(rng, n) if args.b is None else _identity_or(args.b, n, "B")
        C = _random_factor(rng, n) if args.c is None else _identity_or(args.c, n, "C")
    else:
        B = _identity_or(args.b, n, "B")
        C = _identity_or(args.c, n, "C")
    schedule = check_schedule(args.schedule, spec.nilpotent_index)
    rep = iterate_limit(spec, B, C, schedule, side=args.side, jobs=args.jobs)
    csv = rep.csv_text()
    if args.out is None:
        sys.stdout.write(csv)
    else:
        rep.to_csv(args.out)
    final = rep.frob_errors[-1]
    ok = final <= args.tol
    print(
        f"final m={rep.schedule[-1]} frob_error={final:.6e} tol={args.tol:g} {'PASS' if ok else 'FAIL'}",
        file=sys.stderr if args.out is None else sys.stdout,
    )
    return 0 if ok else 1


def cmd_classify(args) -> int:
    spec = _as_spec(load_input(args.a))
    x = parse_vector(args.x)
    res = growth_exponent(spec, x, args.schedule)
    gammas, _ = spec.groups
    print(json.dumps({
        "estimate": res.estimate,
        "gamma": float(gammas[res.classified_j - 1]),
        "j": res.classified_j,
        "membership_j": res.membership_j,
    }))
    return 0


def _sl_input(path, n=None):
    if path is None:
        return np.eye(n), None
    loaded = load_input(path)
    if loaded.spec is not None:
        from .jordan import assemble

        return liebridge.as_sl(assemble(loaded.spec)), loaded.spec
    return liebridge.as_sl(loaded.matrix), None


def cmd_lie(args) -> int:
    g, spec = _sl_input(args.g)
    n = g.shape[0]
    g1, _ = _sl_input(args.g1, n)
    g2, _ = _sl_input(args.g2, n)
    m_max = 0 if args.no_numeric else args.schedule[-1]
    rep = liebridge.ad_consistency(g, g1, g2, m_max=m_max, schedule=args.schedule if m_max else None, spec=spec)
    ok = rep.ok(numeric_tol=args.tol)
    out = {
        "limit": matrix_to_json(rep.lie.limit),
        "k": matrix_to_json(rep.lie.k),
        "b": [float(v) for v in np.diag(rep.lie.b)],
        "ad_predicted_error": rep.predicted_error,
        "ad_modulus_errors": list(rep.modulus_errors),
        "numeric_error": None if rep.report is None else rep.numeric_error,
        "ok": ok,
    }
    text = dump_json(out, args.out)
    if args.out is None:
        print(text)
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    fast = not args.full
    results = acceptance.run_all(
        fast=fast, seed=args.seed, only=args.suite, report=lambda r: print(r.line(), flush=True)
    )
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed ({'fast' if fast else 'full'} mode)")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="asympolar", description="Limits of |B A^m C|^(1/m) and their SL_n(R) counterpart.")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a tolerance (also via ASYMPOLAR_TOL_OVERRIDES)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, schedule="4:4:65536"):
        sp.add_argument("--schedule", type=parse_schedule, default=parse_schedule(schedule),
                        help="start:factor:max (default %(default)s)")
        sp.add_argument("--tol", type=float, default=acceptance.LIMIT_TOL)
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("predict", help="closed-form limit")
    sp.add_argument("a")
    sp.add_argument("c", nargs="?")
    sp.add_argument("--b", default=None, help="left factor (used with --side left)")
    sp.add_argument("--side", choices=("right", "left"), default="right")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("iterate", help="numeric iterates and CSV convergence report")
    sp.add_argument("a")
    sp.add_argument("--b", default=None)
    sp.add_argument("--c", default=None)
    sp.add_argument("--side", choices=("right", "left"), default="right")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--random-bc", action="store_true", help="draw missing B, C from --seed instead of using I")
    common(sp)
    sp.set_defaults(func=cmd_iterate)

    sp = sub.add_parser("classify", help="growth exponent of a vector")
    sp.add_argument("a")
    sp.add_argument("--x", required=True, help="comma-separated entries, e.g. 1,-1 or 1+2j,0")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("lie", help="limit of |g1 g^m g2|^(1/m) in SL_n(R)")
    sp.add_argument("g")
    sp.add_argument("g1", nargs="?")
    sp.add_argument("g2", nargs="?")
    sp.add_argument("--no-numeric", action="store_true", help="skip the numeric iterates")
    common(sp)
    sp.set_defaults(func=cmd_lie)

    sp = sub.add_parser("selftest", help="run the acceptance suites")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--fast", action="store_true", help="schedules up to 2**10, decay checks only (default)")
    mode.add_argument("--full", action="store_true", help="full 2**16 acceptance thresholds")
    sp.add_argument("--suite", choices=acceptance.SUITE_NAMES, default=None)
    sp.add_argument("--seed", type=int, default=42)
    sp.set_defaults(func=cmd_selftest)
    return p


def _apply_overrides(pairs):
    try:
        updates = overrides_from_env()
    except ValueError as exc:  # includes malformed JSON
        raise ParseError(str(exc)) from exc
    for item in pairs:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            updates[key] = None if value.lower() == "none" else float(value)
        except ValueError as exc:
            raise ParseError(f"--set {key}: not a number: {value!r}") from exc
    if updates:
        try:
            return set_tolerances(**updates)
        except TypeError as exc:
            raise ParseError(f"unknown tolerance in {sorted(updates)}") from exc
    return None


def main(argv=None) -> int:
    previous = None
    try:
        args = build_parser().parse_args(argv)
        previous = _apply_overrides(args.set)
        return args.func(args)
    except AsymPolarError as exc:
        print(f"asympolar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    finally:
        if previous is not None:
            set_tolerances(previous)


if __name__ == "__main__":
    sys.exit(main())
