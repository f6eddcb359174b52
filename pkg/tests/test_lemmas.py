import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asympolar import lemmas, numlin
from asympolar.errors import DimensionMismatch
from conftest import random_complex


@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_cauchy_binet(n, seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, n + 1))
    a = random_complex(rng, p, n)
    b = random_complex(rng, n, p)
    ident = lemmas.cauchy_binet(a, b)
    assert ident.defect <= 1e-9 * max(1.0, abs(ident.lhs))
    assert ident.lhs == pytest.approx(np.linalg.det(a @ b), rel=1e-10, abs=1e-10)


def test_cauchy_binet_shapes():
    with pytest.raises(DimensionMismatch):
        lemmas.cauchy_binet(np.ones((3, 2)), np.ones((2, 3)))


@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_unitary_minor_sum(n, seed):
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(random_complex(rng, n, n))
    for p in range(1, n + 1):
        assert lemmas.unitary_minor_sum(u, p).defect <= 1e-9


def test_unitary_minor_sum_non_unitary():
    assert lemmas.unitary_minor_sum(2 * np.eye(2), 1).defect == pytest.approx(3)


@given(st.integers(2, 4), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_loewner_root_monotone(n, m, seed):
    rng = np.random.default_rng(seed)
    x = random_complex(rng, n, n)
    y = random_complex(rng, n, n)
    a = x @ x.conj().T
    b = a + y @ y.conj().T
    assert lemmas.monotone_root_property(a, b, m, 1e-9)


def test_monotone_requires_order():
    with pytest.raises(ValueError):
        lemmas.monotone_root_property(np.diag([2.0, 0.0]), np.eye(2), 1)


def test_squared_root_not_monotone_counterexample():
    # squaring is not operator monotone, roots are; this pair separates them
    a = np.array([[1.0, 0.0], [0.0, 0.0]])
    b = np.array([[2.0, 1.0], [1.0, 1.0]])
    assert numlin.loewner_leq(a, b)
    assert not numlin.loewner_leq(a @ a, b @ b)
    assert lemmas.monotone_root_property(a, b, 1)


def test_sandwich(rng):
    n = 3
    x = random_complex(rng, n, n)
    B = x @ x.conj().T + np.eye(n)
    lower, middle, upper = [], [], []
    for m in (1, 4, 16, 64, 256):
        gap = np.eye(n) / m
        y = random_complex(rng, n, n)
        P = y @ y.conj().T
        P = P / np.linalg.eigvalsh(P)[-1] / m  # 0 <= P <= gap
        lower.append(B - gap)
        middle.append(B + P - gap / 2)
        upper.append(B + 2 * gap)
    rep = lemmas.sandwich_property(lower, middle, upper, B)
    assert rep.ordered
    assert np.all(rep.distances <= rep.outer_distances * 2)
    assert rep.distances[-1] < 1e-2


def test_sandwich_length_mismatch():
    with pytest.raises(DimensionMismatch):
        lemmas.sandwich_property([np.eye(2)], [], [], np.eye(2))
