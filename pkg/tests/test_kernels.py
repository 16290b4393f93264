"""Backend equivalence: the jitted kernels must agree with the numpy path
and with the plain per-state evaluators."""

import numpy as np
import pytest

import mublab.kernels as kernels
from conftest import random_states
from mublab.functionals import entropy_sum, permutation_table, variance_sum
from mublab.linalg import born_probabilities

NUMBA = kernels.numba_impl()
NUMPY = kernels.numpy_impl()

needs_numba = pytest.mark.skipif(NUMBA is None, reason="numba unavailable")


def test_active_backend_is_one_of_the_two():
    assert kernels.BACKEND in ("numba", "numpy")


@needs_numba
def test_params_to_state_backends_agree(rng):
    for d in (4, 5):
        for _ in range(50):
            x = rng.uniform(-np.pi, np.pi, size=2 * d - 2)
            a = NUMBA.params_to_state(x, d)
            b = NUMPY.params_to_state(x, d)
            assert np.array_equal(a, b)


@needs_numba
def test_entropy_block_backends_agree(mubs5, rng):
    states = random_states(rng, 500, 5)
    stack = mubs5.conj_stack("ABE")
    a = NUMBA.entropy_sum_block(states, stack)
    b = NUMPY.entropy_sum_block(states, stack)
    assert np.abs(a - b).max() < 1e-12


@needs_numba
def test_variance_block_backends_agree(mubs4, rng):
    states = random_states(rng, 300, 4)
    stack = mubs4.conj_stack("BCD")
    perms = permutation_table(4)
    a = NUMBA.variance_sum_block(states, stack, perms)
    b = NUMPY.variance_sum_block(states, stack, perms)
    assert np.abs(a - b).max() < 1e-12


@needs_numba
def test_objectives_backends_agree(mubs5, rng):
    stack = mubs5.conj_stack("DEF")
    perms = permutation_table(5)
    for _ in range(25):
        x = rng.uniform(-np.pi, np.pi, size=8)
        assert NUMBA.entropy_objective(x, stack) == pytest.approx(
            NUMPY.entropy_objective(x, stack), abs=1e-12)
        assert NUMBA.variance_objective(x, stack, perms) == pytest.approx(
            NUMPY.variance_objective(x, stack, perms), abs=1e-12)


def test_born_block_matches_reference(mubs5, rng):
    states = random_states(rng, 100, 5)
    mc = mubs5.matrix("C").conj()
    block = kernels.born_probs_block(states, mc)
    for k in range(100):
        ref = born_probabilities(states[k], mubs5.basis("C"))
        assert np.abs(block[k] - ref).max() < 1e-12


def test_entropy_block_matches_reference(mubs5, rng):
    states = random_states(rng, 100, 5)
    stack = mubs5.conj_stack("BDF")
    block = kernels.entropy_sum_block(states, stack)
    bases = [mubs5.basis(c) for c in "BDF"]
    for k in range(100):
        assert block[k] == pytest.approx(entropy_sum(states[k], bases), abs=1e-11)


def test_variance_block_matches_reference(mubs5, rng):
    states = random_states(rng, 60, 5)
    stack = mubs5.conj_stack("ACE")
    block = kernels.variance_sum_block(states, stack, permutation_table(5))
    bases = [mubs5.basis(c) for c in "ACE"]
    for k in range(60):
        assert block[k] == pytest.approx(variance_sum(states[k], bases), abs=1e-11)


def test_backend_env_selection(monkeypatch):
    monkeypatch.setenv(kernels.BACKEND_ENV, "numpy")
    assert kernels._select_backend().name == "numpy"
    monkeypatch.setenv(kernels.BACKEND_ENV, "bogus")
    with pytest.raises(ValueError):
        kernels._select_backend()
