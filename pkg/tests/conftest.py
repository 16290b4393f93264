import numpy as np
import pytest

from mublab.catalog import build_mub_set


@pytest.fixture(scope="session")
def mubs5():
    return build_mub_set(5)


@pytest.fixture(scope="session")
def mubs4():
    return build_mub_set(4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_states(rng, n, d):
    z = rng.standard_normal((n, 2 * d))
    states = z[:, :d] + 1j * z[:, d:]
    return states / np.linalg.norm(states, axis=1, keepdims=True)
