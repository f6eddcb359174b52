import io

import mpmath
import numpy as np
import pytest

from asympolar import numlin
from asympolar.asymlimit import (
    DEFAULT_SCHEDULE,
    diag_lower_limit,
    growth_exponent,
    iterate_limit,
    limit_from_hyperbolic,
    nayak_projections,
    perturbed_limit_property,
    predicted_limit_left,
    predicted_limit_right,
)
from asympolar.config import tolerances
from asympolar.errors import (
    AmbiguousClassification,
    ScheduleError,
    SingularB,
    SingularC,
    SingularInput,
    SingularL,
    ZeroVector,
)
from asympolar.jordan import JordanSpec, assemble
from conftest import random_complex, well_conditioned
from helpers import brute_root, mp_matrix, reference_limit_right

M21 = np.array([[1.0, 1.0], [0.0, -1.0]])
SPEC21 = JordanSpec(M21, ((2, 1), (1, 1)))  # A = [[2,1],[0,1]]
LIMIT21_I = np.array([[1.5, 0.5], [0.5, 1.5]])
C_LOWER = np.array([[1.0, 0.0], [1.0, 1.0]])
LIMIT21_C = np.array([[1.8, 0.4], [0.4, 1.2]])
ROT = np.array([[np.cos(np.pi / 3), -np.sin(np.pi / 3)], [np.sin(np.pi / 3), np.cos(np.pi / 3)]])

ENGINE_CASES = [
    ((2, 1), (1.5j, 1), (1, 1)),
    ((2, 2), (0.5, 1)),
    ((1.3, 3),),
    ((2, 1), (0, 2)),
    ((np.exp(0.4j), 2), (0.6, 1)),
]


def spec_of_adjoint(spec):
    """Jordan data of ``A^*``: ``J^* = P J(conj mu) P`` blockwise with reversal ``P``."""
    n = spec.n
    P = np.zeros((n, n))
    for sl in spec.block_slices:
        idx = np.arange(sl.start, sl.stop)
        P[idx, idx[::-1]] = 1
    Mstar = np.linalg.inv(spec.M).conj().T @ P
    return JordanSpec(Mstar, tuple((np.conj(mu), s) for mu, s in spec.blocks))


# -- closed forms -------------------------------------------------------------------

def test_predicted_diagonal():
    res = predicted_limit_right(JordanSpec(np.eye(2), ((3, 1), (1, 1))), np.eye(2))
    np.testing.assert_allclose(res.limit, np.diag([3, 1]), atol=1e-15)


def test_predicted_nilpotent_is_zero():
    res = predicted_limit_right(JordanSpec(np.eye(2), ((0, 2),)), np.eye(2))
    np.testing.assert_array_equal(res.limit, np.zeros((2, 2)))


def test_predicted_derived_values():
    np.testing.assert_allclose(predicted_limit_right(SPEC21, C_LOWER).limit, LIMIT21_C, atol=1e-12)
    np.testing.assert_allclose(predicted_limit_right(SPEC21, np.eye(2)).limit, LIMIT21_I, atol=1e-12)


def test_predicted_derived_factors():
    res = predicted_limit_right(SPEC21, C_LOWER)
    np.testing.assert_allclose(res.Q, np.array([[2, 1], [1, -2]]) / np.sqrt(5), atol=1e-14)
    assert res.gammas == (2.0, 1.0) and res.multiplicities == (1, 1)


def test_predicted_singular_c():
    with pytest.raises(SingularC):
        predicted_limit_right(SPEC21, np.array([[1.0, 1.0], [1.0, 1.0]]))


@pytest.mark.parametrize("seed", range(20))
def test_predicted_matches_reference(seed):
    rng = np.random.default_rng(seed)
    n = 4
    spec = JordanSpec(np.eye(n) + 0.3 * random_complex(rng, n, n),
                      ((2, 2), (-2, 1), (0.5j, 1)))
    C = well_conditioned(rng, n)
    res = predicted_limit_right(spec, C)
    np.testing.assert_allclose(res.limit, reference_limit_right(spec.M, spec.D, C), atol=1e-10)
    # LimitResult invariants
    np.testing.assert_allclose(res.limit, res.Q.conj().T @ np.diag(res.D) @ res.Q, atol=1e-10)
    np.testing.assert_allclose(np.linalg.eigvalsh(res.limit)[::-1], res.D, atol=1e-10)


def test_left_diagonal():
    res = predicted_limit_left(JordanSpec(np.eye(2), ((3, 1), (1, 1))), np.eye(2))
    np.testing.assert_allclose(res.limit, np.diag([3, 1]), atol=1e-15)
    assert res.side == "left"


def test_left_with_unitary_bm(rng):
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((2, 1), (1, 2)))
    U, _ = np.linalg.qr(random_complex(rng, 3, 3))
    B = U @ np.linalg.inv(spec.M)
    res = predicted_limit_left(spec, B)
    want = (B @ spec.M) @ np.diag(spec.D) @ (B @ spec.M).conj().T
    np.testing.assert_allclose(res.limit, want, atol=1e-12)


def test_left_equals_right_on_adjoint(rng):
    for spec in (SPEC21, JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((1j, 2), (0.5, 1)))):
        B = well_conditioned(rng, spec.n)
        left = predicted_limit_left(spec, B).limit
        right = predicted_limit_right(spec_of_adjoint(spec), B.conj().T).limit
        np.testing.assert_allclose(left, right, atol=1e-10)


def test_left_singular_b():
    with pytest.raises(SingularB):
        predicted_limit_left(SPEC21, np.zeros((2, 2)))


def test_limit_from_hyperbolic_sorts():
    res = limit_from_hyperbolic(M21[:, ::-1], [1.0, 2.0], np.eye(2))
    np.testing.assert_allclose(res.limit, LIMIT21_I, atol=1e-12)


# -- iteration engine ------------------------------------------------------------------

def test_iterate_diagonal_fixed_point():
    rep = iterate_limit(JordanSpec(np.eye(2), ((3, 1), (1, 1))), np.eye(2), np.eye(2), [4, 16])
    np.testing.assert_array_equal(rep.frob_errors, [0, 0])


def test_iterate_rotation_is_identity():
    rep = iterate_limit(JordanSpec(np.array([[1, 1], [-1j, 1j]]) / np.sqrt(2), ((np.exp(1j * np.pi / 3), 1), (np.exp(-1j * np.pi / 3), 1))),
                        np.eye(2), np.eye(2), [1, 7, 1000])
    for it in rep.iterates:
        np.testing.assert_allclose(it, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(assemble(JordanSpec(np.array([[1, 1], [-1j, 1j]]) / np.sqrt(2),
                                                   ((np.exp(1j * np.pi / 3), 1), (np.exp(-1j * np.pi / 3), 1)))),
                               ROT, atol=1e-14)


def test_iterate_derived_error_sequence():
    # frozen from explicit powering in mpmath at m * log10(4) + 100 digits
    rep = iterate_limit(SPEC21, np.eye(2), np.eye(2))
    frozen = {4: 0.18756202268042277, 4096: 0.00018920453611577054, 65536: 1.1825002083505629e-05}
    for m, want in frozen.items():
        got = rep.frob_errors[rep.schedule.index(m)]
        assert got == pytest.approx(want, rel=1e-8)
    assert rep.frob_errors[-1] <= 3e-3


@pytest.mark.parametrize("blocks", ENGINE_CASES, ids=lambda b: str(b))
@pytest.mark.parametrize("m", [3, 40, 1024])
def test_engine_matches_brute_force(blocks, m):
    rng = np.random.default_rng(7)
    n = sum(s for _, s in blocks)
    M = np.eye(n) + 0.3 * random_complex(rng, n, n)
    B, C = well_conditioned(rng, n), well_conditioned(rng, n)
    spec = JordanSpec(M, blocks)
    for side in ("right", "left"):
        rep = iterate_limit(spec, B, C, [m], side=side)
        want = brute_root(spec.M, spec.blocks, B, C, m, side=side)
        np.testing.assert_allclose(rep.iterates[0], want, atol=1e-12)


@pytest.mark.slow
def test_engine_matches_brute_force_large_m():
    rng = np.random.default_rng(8)
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((1.3, 2), (1, 1)))
    B, C = well_conditioned(rng, 3), well_conditioned(rng, 3)
    rep = iterate_limit(spec, B, C, [2 ** 16])
    want = brute_root(spec.M, spec.blocks, B, C, 2 ** 16)
    np.testing.assert_allclose(rep.iterates[0], want, atol=1e-12)


def test_iterate_rejects_bad_input():
    with pytest.raises(SingularInput):
        iterate_limit(SPEC21, np.zeros((2, 2)), np.eye(2), [4])
    with pytest.raises(ScheduleError):
        iterate_limit(SPEC21, np.eye(2), np.eye(2), [16, 4])
    with pytest.raises(ScheduleError):
        iterate_limit(JordanSpec(np.eye(3), ((0, 3),)), np.eye(3), np.eye(3), [2, 4])
    with pytest.raises(ValueError):
        iterate_limit(SPEC21, np.eye(2), np.eye(2), [4], side="up")


def test_iterates_are_psd_and_schedule_increasing(rng):
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((1j, 2), (0.5, 1)))
    rep = iterate_limit(spec, well_conditioned(rng, 3), well_conditioned(rng, 3), [4, 64, 4096])
    assert list(rep.schedule) == sorted(set(rep.schedule))
    for it in rep.iterates:
        np.testing.assert_allclose(it, it.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(it)[0] >= -1e-12


def test_csv_format():
    rep = iterate_limit(SPEC21, np.eye(2), np.eye(2), [4, 16])
    text = rep.csv_text()
    lines = text.splitlines()
    assert lines[0] == "m,frob_error,spec_error,sv_error"
    m, f, s, v = lines[1].split(",")
    assert int(m) == 4 and float(f) == rep.frob_errors[0]
    buf = io.StringIO(text)
    data = np.genfromtxt(buf, delimiter=",", names=True)
    np.testing.assert_array_equal(data["spec_error"], rep.spec_errors)


def test_parallel_schedule_matches_serial():
    a = iterate_limit(SPEC21, np.eye(2), C_LOWER, [4, 64, 1024], jobs=1).csv_text()
    b = iterate_limit(SPEC21, np.eye(2), C_LOWER, [4, 64, 1024], jobs=2).csv_text()
    assert a == b


def test_b_independence(rng):
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((2, 2), (1, 1)))
    C = well_conditioned(rng, 3)
    r1 = iterate_limit(spec, well_conditioned(rng, 3), C, [2 ** 16])
    r2 = iterate_limit(spec, well_conditioned(rng, 3), C, [2 ** 16])
    bound = max(r1.frob_errors[-1], r2.frob_errors[-1])
    assert np.linalg.norm(r1.iterates[-1] - r2.iterates[-1]) <= 2 * bound


def test_m_independence(rng):
    spec = JordanSpec(np.eye(4) + 0.3 * random_complex(rng, 4, 4), ((2, 1), (-2, 1), (1j, 2)))
    C = well_conditioned(rng, 4)
    R = np.zeros((4, 4), dtype=complex)
    R[:2, :2] = well_conditioned(rng, 2)
    R[2:, 2:] = well_conditioned(rng, 2)
    other = JordanSpec(spec.M @ R, spec.blocks)
    np.testing.assert_allclose(predicted_limit_right(other, C).limit,
                               predicted_limit_right(spec, C).limit, atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_phase_and_group_order_invariance(seed):
    rng = np.random.default_rng(seed)
    M = np.eye(4) + 0.3 * random_complex(rng, 4, 4)
    D = np.array([3.0, 3.0, 3.0, 0.5])
    C = well_conditioned(rng, 4)
    base = limit_from_hyperbolic(M, D, C).limit
    phases = np.exp(2j * np.pi * rng.random(4))
    perm = np.concatenate([rng.permutation(3), [3]])
    other = limit_from_hyperbolic((M * phases)[:, perm], D, C).limit
    np.testing.assert_allclose(other, base, atol=1e-10)


def test_real_inputs_give_real_limit(rng):
    # real A with a complex pair: the similarity is complex but the limit is real
    A = np.array([[0.5, -2.0, 0.3], [2.0, 0.5, 0.1], [0.0, 0.0, 0.7]])
    from asympolar.jordan import cmjd_numeric

    spec, _ = cmjd_numeric(A)
    C = rng.normal(size=(3, 3))
    lim = predicted_limit_right(spec, C).limit
    assert numlin.max_abs(lim.imag) <= 1e-10


def test_yamamoto_decay(rng):
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((1.3, 3),))
    rep = iterate_limit(spec, well_conditioned(rng, 3), well_conditioned(rng, 3))
    assert np.all(np.diff(rep.sv_errors) < 0)
    assert rep.sv_errors[-1] <= 3e-3


def test_spectral_radius_component():
    rep = iterate_limit(SPEC21, np.eye(2), np.eye(2))
    s1 = np.exp(np.array([ls[0] for ls in rep.log_singular_values]) / np.array(rep.schedule))
    # ||A^m||^(1/m) against a direct norm in mpmath
    with mpmath.workdps(50):
        A = mp_matrix([[2, 1], [0, 1]])
        direct = [float(max(mpmath.svd_c(A ** m, compute_uv=False)) ** (mpmath.mpf(1) / m)) for m in (4, 16, 64)]
    np.testing.assert_allclose(s1[:3], direct, rtol=1e-12)
    assert abs(s1[-1] - 2) < 3e-3


# -- projections and growth -----------------------------------------------------------

def test_nayak_diagonal():
    nay = nayak_projections(JordanSpec(np.eye(2), ((3, 1), (1, 1))))
    np.testing.assert_allclose(nay.E(1), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(nay.E(2), np.diag([0, 1]), atol=1e-15)
    np.testing.assert_allclose(nay.reconstruction, np.diag([3, 1]), atol=1e-15)


def test_nayak_derived():
    nay = nayak_projections(SPEC21)
    np.testing.assert_allclose(nay.E(1), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(nay.E(2), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)
    np.testing.assert_allclose(nay.reconstruction, LIMIT21_I, atol=1e-15)
    np.testing.assert_array_equal(nay.E(3), np.zeros((2, 2)))


def test_nayak_single_modulus():
    nay = nayak_projections(JordanSpec(np.array([[1, 1], [-1j, 1j]]), ((1j, 1), (-1j, 1))))
    assert len(nay.projections) == 1
    np.testing.assert_allclose(nay.reconstruction, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_nayak_invariants(seed):
    rng = np.random.default_rng(seed)
    spec = JordanSpec(np.eye(5) + 0.3 * random_complex(rng, 5, 5), ((2, 2), (2j, 1), (0.5, 1), (0, 1)))
    nay = nayak_projections(spec)
    np.testing.assert_allclose(nay.reconstruction, predicted_limit_right(spec, np.eye(5)).limit, atol=1e-10)
    A = assemble(spec)
    mults = nay.multiplicities
    for j in range(1, len(nay.projections) + 1):
        E, nxt = nay.E(j), nay.E(j + 1)
        np.testing.assert_allclose(E @ E, E, atol=1e-9)
        np.testing.assert_allclose(E, E.conj().T, atol=1e-9)
        np.testing.assert_allclose(E @ nxt, nxt, atol=1e-9)
        assert np.linalg.matrix_rank(E, tol=1e-6) == sum(mults[j - 1:])
        x = E @ random_complex(rng, 5)
        assert np.linalg.norm(E @ A @ x - A @ x) <= 1e-9 * np.linalg.norm(A) * np.linalg.norm(x)


def test_growth_examples():
    diag = JordanSpec(np.eye(2), ((3, 1), (1, 1)))
    r = growth_exponent(diag, [1, 0])
    assert r.estimate == pytest.approx(3) and r.classified_j == 1
    r = growth_exponent(SPEC21, [1, -1])
    assert r.estimate == pytest.approx(1, abs=1e-4) and r.classified_j == 2 and r.membership_j == 2
    r = growth_exponent(SPEC21, [0, 1])
    assert r.estimate == pytest.approx(2) and r.classified_j == 1


def test_growth_matches_power_iteration():
    # ||A^m x||^(1/m) at m = 2**16 by explicit powering
    with mpmath.workdps(60):
        A = mp_matrix([[2, 1], [0, 1]])
        v = A ** (2 ** 16) * mp_matrix([[0], [1]])
        direct = float(mpmath.norm(v, 2) ** (mpmath.mpf(1) / 2 ** 16))
    assert growth_exponent(SPEC21, [0, 1]).estimate == pytest.approx(direct, rel=1e-12)
    assert growth_exponent(SPEC21, [1, -1]).estimate == pytest.approx(2 ** (0.5 / 2 ** 16), rel=1e-12)


def test_growth_zero_group():
    spec = JordanSpec(np.eye(3), ((2, 1), (0, 2)))
    r = growth_exponent(spec, [0, 1, 1])
    assert r.estimate == 0 and r.classified_j == 2


def test_growth_errors():
    with pytest.raises(ZeroVector):
        growth_exponent(SPEC21, [0, 0])
    with tolerances(match_tol=1e-9):
        with pytest.raises(AmbiguousClassification):
            growth_exponent(SPEC21, [1, -1])


def test_growth_random_vectors(rng):
    spec = JordanSpec(np.eye(4) + 0.3 * random_complex(rng, 4, 4), ((3, 1), (1j, 2), (0.4, 1)))
    nay = nayak_projections(spec)
    for _ in range(30):
        j = int(rng.integers(1, 4))
        x = nay.E(j) @ random_complex(rng, 4)
        r = growth_exponent(spec, x)
        assert r.classified_j == r.membership_j == j
        assert r.estimate == pytest.approx(nay.gammas[j - 1], rel=1e-3)


# -- supporting limits --------------------------------------------------------------------

def test_diag_lower_identity():
    rep = diag_lower_limit([2, 1], np.eye(2))
    np.testing.assert_array_equal(rep.frob_errors, 0)


def test_diag_lower_derived():
    rep = diag_lower_limit([2, 1], [[1, 0], [1, 1]])
    assert rep.frob_errors[-1] <= 3e-3


def test_diag_lower_singular_d():
    rep = diag_lower_limit([1, 0], [[1, 0], [5, 1]], [2 ** 12])
    np.testing.assert_allclose(rep.iterates[0], np.diag([1, 0]), atol=1e-15)
    with mpmath.workdps(40):
        X = mpmath.diag([1, 0]) ** (2 ** 12) * mp_matrix([[1, 0], [5, 1]])
        s = mpmath.svd_c(X, compute_uv=False)
    np.testing.assert_allclose(sorted(float(v) for v in s), [0, 1], atol=1e-15)


def test_diag_lower_errors():
    with pytest.raises(SingularL):
        diag_lower_limit([2, 1], [[1, 0], [1, 0]])
    with pytest.raises(ValueError):
        diag_lower_limit([2, 1], [[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        diag_lower_limit([1, 2], np.eye(2))


@pytest.mark.parametrize("kind", ["elliptic-unipotent", "unitary", "bounded-polynomial"])
def test_perturbed_limit(kind, rng):
    spec = JordanSpec(np.eye(3) + 0.3 * random_complex(rng, 3, 3), ((1.3, 2), (0.5j, 1)))
    rep = perturbed_limit_property(kind, spec, seed=3)
    assert abs(rep.s_max_roots[-1] - 1) <= 1e-3
    assert abs(rep.s_min_roots[-1] - 1) <= 1e-3
    assert rep.frob_errors[-1] <= 3e-3
    assert rep.reference_gaps[-1] <= 3e-3
    if kind == "unitary":
        np.testing.assert_allclose(rep.s_max_roots, 1, atol=1e-12)
        np.testing.assert_allclose(rep.s_min_roots, 1, atol=1e-12)


def test_perturbed_unipotent_growth():
    spec = JordanSpec(np.eye(2), ((1, 2),))
    rep = perturbed_limit_property("elliptic-unipotent", spec, [4, 2 ** 16])
    # ||(I + N)^m|| grows linearly, so its m-th root tends to 1
    assert rep.s_max_roots[0] > rep.s_max_roots[-1] > 1
    assert rep.s_max_roots[-1] - 1 <= 1e-3


def test_perturbed_rejects_unknown_kind():
    with pytest.raises(ValueError):
        perturbed_limit_property("none", SPEC21)


def test_default_schedule():
    assert DEFAULT_SCHEDULE == tuple(4 ** k for k in range(1, 9))
