import itertools
import math

import numpy as np
import pytest

from conftest import random_states
from mublab.functionals import (
    entropy_sum,
    evaluate,
    min_variance,
    permutation_table,
    shannon_entropy,
    variance_sum,
)
from mublab.linalg import born_probabilities
from mublab.optimize import S2_REFERENCE_AMPLITUDES, S2_REFERENCE_PHASE_FIFTHS, reference_state

LOG2_5 = math.log2(5)


def test_entropy_deterministic():
    assert shannon_entropy([1, 0, 0, 0, 0]) == 0.0


def test_entropy_uniform():
    assert shannon_entropy([0.2] * 5) == pytest.approx(LOG2_5, abs=1e-12)


def test_entropy_fair_coin():
    assert shannon_entropy([0.5, 0.5, 0, 0, 0]) == pytest.approx(1.0, abs=1e-12)


def test_entropy_bounds_on_random_vectors(rng):
    p = rng.dirichlet(np.ones(5), size=100_000)
    safe = np.where(p > 1e-15, p, 1.0)
    h = -(safe * np.log2(safe)).sum(axis=1)
    assert h.min() >= 0.0
    assert h.max() <= LOG2_5 + 1e-12
    for row in p[:50]:
        assert 0.0 <= shannon_entropy(row) <= LOG2_5 + 1e-12


def test_entropy_concavity(rng):
    for _ in range(50):
        p, q = rng.dirichlet(np.ones(5), size=2)
        mixed = shannon_entropy((p + q) / 2)
        assert mixed >= (shannon_entropy(p) + shannon_entropy(q)) / 2 - 1e-12


def test_entropy_sum_eigenstate_over_triplet(mubs5):
    psi = mubs5.basis("A").column(0)
    bases = [mubs5.basis(c) for c in "ABC"]
    assert entropy_sum(psi, bases) == pytest.approx(2 * LOG2_5, abs=1e-12)


def test_entropy_sum_eigenstate_over_pair(mubs5):
    psi = mubs5.basis("A").column(0)
    bases = [mubs5.basis(c) for c in "BC"]
    assert entropy_sum(psi, bases) == pytest.approx(2 * LOG2_5, abs=1e-12)


def test_entropy_sum_reference_minimizer(mubs5):
    psi = reference_state(S2_REFERENCE_AMPLITUDES, S2_REFERENCE_PHASE_FIFTHS)
    val = entropy_sum(psi, [mubs5.basis(c) for c in "DEF"])
    assert val == pytest.approx(4.43223, abs=1e-5)


def test_eigenstate_invariant_all_bases(mubs5, mubs4):
    # an eigenstate of a member basis scores (k-1) log2(d) on any triplet containing it
    for mubs in (mubs5, mubs4):
        target = 2 * math.log2(mubs.dim)
        for b in mubs:
            rest = [c for c in mubs.letters if c != b.label]
            triplet = [mubs.basis(b.label)] + [mubs.basis(c) for c in rest[:2]]
            for j in range(mubs.dim):
                val = entropy_sum(b.column(j), triplet)
                assert val == pytest.approx(target, abs=1e-10)


def test_min_variance_eigenstate(mubs5):
    val, _ = min_variance(mubs5.basis("A").column(3), mubs5.basis("A"))
    assert val == pytest.approx(0.0, abs=1e-12)


def test_min_variance_uniform(mubs5):
    psi = mubs5.basis("B").column(0)  # uniform in A
    val, _ = min_variance(psi, mubs5.basis("A"))
    assert val == pytest.approx(2.0, abs=1e-12)


def brute_force_min_variance(p, eigenvalues):
    best = math.inf
    for perm in itertools.permutations(eigenvalues):
        vals = np.array(perm, dtype=float)
        e1 = float(vals @ p)
        e2 = float((vals * vals) @ p)
        best = min(best, e2 - e1 * e1)
    return best


def test_min_variance_superposition_brute_force(mubs5):
    a = mubs5.matrix("A")
    psi = (a[:, 0] + a[:, 1]) / np.sqrt(2)
    p = born_probabilities(psi, mubs5.basis("A"))
    oracle = brute_force_min_variance(p, range(5))
    assert oracle == pytest.approx(0.25, abs=1e-12)
    val, perm = min_variance(psi, mubs5.basis("A"))
    assert val == pytest.approx(oracle, abs=1e-12)
    assert abs(perm[0] - perm[1]) == 1  # adjacent integers on the two live outcomes


def test_min_variance_matches_brute_force_random(mubs5, rng):
    states = random_states(rng, 25, 5)
    for psi in states:
        p = born_probabilities(psi, mubs5.basis("D"))
        val, _ = min_variance(psi, mubs5.basis("D"))
        assert val == pytest.approx(brute_force_min_variance(p, range(5)), abs=1e-12)


def test_min_variance_shift_invariance(mubs5, rng):
    states = random_states(rng, 25, 5)
    for psi in states:
        v0, _ = min_variance(psi, mubs5.basis("C"))
        v1, _ = min_variance(psi, mubs5.basis("C"), eigenvalues=np.arange(1, 6))
        assert abs(v0 - v1) <= 1e-12


def test_variance_sum_eigenstate(mubs5):
    psi = mubs5.basis("A").column(0)
    val = variance_sum(psi, [mubs5.basis(c) for c in "ABC"])
    assert val == pytest.approx(4.0, abs=1e-12)


def test_permutation_table_shape():
    assert permutation_table(4).shape == (24, 4)
    assert permutation_table(5).shape == (120, 5)


def test_evaluate_dispatch(mubs5):
    psi = mubs5.basis("A").column(0)
    bases = [mubs5.basis(c) for c in "ABC"]
    assert evaluate("entropy", psi, bases) == pytest.approx(entropy_sum(psi, bases))
    assert evaluate("variance", psi, bases) == pytest.approx(variance_sum(psi, bases))
    with pytest.raises(ValueError):
        evaluate("renyi", psi, bases)
