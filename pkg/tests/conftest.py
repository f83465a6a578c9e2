import numpy as np
import pytest


def random_symmetric(n, seed, diag_scale=1.0):
    """Seeded complex symmetric matrix with entries in the unit square."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (n, n)) + 1j * rng.uniform(-1, 1, (n, n))
    a = (a + a.T) / 2
    if diag_scale != 1.0:
        np.fill_diagonal(a, diag_scale * np.diag(a))
    return a


def rel_err(approx, exact):
    exact = complex(exact)
    scale = max(1e-300, abs(exact))
    return abs(complex(approx) - exact) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
