import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def well_conditioned(rng, n, complex_=True, cond_max=50.0):
    while True:
        x = random_complex(rng, n, n) if complex_ else rng.normal(size=(n, n))
        if np.linalg.cond(x) < cond_max:
            return x
