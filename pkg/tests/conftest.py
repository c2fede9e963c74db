import numpy as np
import pytest

from rmscert import AlgoParams, Quadratic, default_catalog, make_spec

# Reference parameter tuple used throughout: admissible for every catalog
# objective (all have L <= 2 < 2*epsilon/(eta0+eta1) = 10).
REF = AlgoParams(beta=0.5, epsilon=1.0, eta0=0.1, eta1=0.1)


@pytest.fixture(scope="session")
def ref_params():
    return REF


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def unit_quad():
    """d = 1 quadratic with Q = [[1]], x* = 0, f* = 0: f(x) = x^2 / 2."""
    return Quadratic([[1.0]], [0.0])


@pytest.fixture(scope="session")
def ref_spec(unit_quad):
    return make_spec(REF, unit_quad.L, unit_quad.d)


def random_state_batch(obj, n, rng, x_range=10.0, s_range=10.0):
    """Mixed-scale random states used by several property tests."""
    half = n // 2
    X = np.empty((n, obj.d))
    X[:half] = rng.uniform(-x_range, x_range, (half, obj.d))
    X[half:] = rng.choice([-1.0, 1.0], (n - half, obj.d)) * \
        10.0 ** rng.uniform(-8.0, np.log10(x_range), (n - half, obj.d))
    X += obj.x_star
    S = np.empty((n, obj.d))
    S[:half] = rng.uniform(0.0, s_range, (half, obj.d))
    S[half:] = 10.0 ** rng.uniform(-10.0, np.log10(s_range), (n - half, obj.d))
    S[rng.random((n, obj.d)) < 0.1] = 0.0
    return X, S
