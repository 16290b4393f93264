import numpy as np
import pytest

from conftest import random_states
from mublab.linalg import (
    apply_unitary,
    as_state,
    born_probabilities,
    inner_product,
    is_unitary,
    normalize,
)


def test_inner_product_orthonormality(mubs5):
    a = mubs5.matrix("A")
    assert inner_product(a[:, 0], a[:, 0]) == pytest.approx(1.0)
    assert inner_product(a[:, 0], a[:, 1]) == pytest.approx(0.0)


def test_inner_product_unbiased_overlap(mubs5):
    a0 = mubs5.matrix("A")[:, 0]
    b0 = mubs5.matrix("B")[:, 0]
    assert abs(inner_product(a0, b0)) ** 2 == pytest.approx(1 / 5, abs=1e-14)


def test_inner_product_conjugates_first_argument():
    x = np.array([1j, 0, 0, 0, 0])
    y = np.array([1.0, 0, 0, 0, 0])
    assert inner_product(x, y) == pytest.approx(-1j)


def test_inner_product_dimension_mismatch():
    with pytest.raises(ValueError):
        inner_product(np.zeros(4), np.zeros(5))


def test_born_eigenstate(mubs5):
    psi = mubs5.basis("A").column(2)
    p = born_probabilities(psi, mubs5.basis("A"))
    assert np.allclose(p, [0, 0, 1, 0, 0], atol=1e-14)


def test_born_unbiased_uniform(mubs5):
    psi = mubs5.basis("A").column(0)
    p = born_probabilities(psi, mubs5.basis("B"))
    assert np.allclose(p, 0.2, atol=1e-14)


def test_born_two_term_superposition(mubs5):
    a = mubs5.matrix("A")
    psi = (a[:, 0] + a[:, 1]) / np.sqrt(2)
    p = born_probabilities(psi, mubs5.basis("A"))
    assert np.allclose(p, [0.5, 0.5, 0, 0, 0], atol=1e-14)


def test_born_sums_to_one_on_random_pairs(rng):
    # 1e5 random (unitary, state) pairs per the library contract
    n = 100_000
    z = rng.standard_normal((n, 5, 5)) + 1j * rng.standard_normal((n, 5, 5))
    q, r = np.linalg.qr(z)
    q *= (np.diagonal(r, axis1=1, axis2=2) / np.abs(np.diagonal(r, axis1=1, axis2=2)))[:, None, :]
    states = random_states(rng, n, 5)
    amp = np.einsum("nij,ni->nj", q.conj(), states)
    sums = (amp.real**2 + amp.imag**2).sum(axis=1)
    assert np.abs(sums - 1.0).max() < 1e-10


def test_born_global_phase_invariance(mubs5, rng):
    psi = random_states(rng, 1, 5)[0]
    base = born_probabilities(psi, mubs5.basis("C"))
    for theta in np.linspace(0.0, 2 * np.pi, 16, endpoint=False):
        p = born_probabilities(np.exp(1j * theta) * psi, mubs5.basis("C"))
        assert np.abs(p - base).max() <= 1e-14


def test_born_dimension_mismatch(mubs5, mubs4):
    with pytest.raises(ValueError):
        born_probabilities(mubs4.basis("A").column(0), mubs5.basis("B"))


def test_apply_unitary_identity(mubs5, rng):
    psi = random_states(rng, 1, 5)[0]
    assert np.array_equal(apply_unitary(np.eye(5), psi), psi)


def test_apply_unitary_diagonal_shift(mubs5):
    from mublab.catalog import OMEGA, shift_unitary

    psi = mubs5.basis("A").column(1)
    out = apply_unitary(shift_unitary(), psi)
    assert np.allclose(out, OMEGA * psi, atol=1e-14)
    p0 = born_probabilities(psi, mubs5.basis("A"))
    p1 = born_probabilities(out, mubs5.basis("A"))
    assert np.allclose(p0, p1, atol=1e-14)


def test_fourier_maps_first_column(mubs5):
    # direct column read-off: the Fourier image of |a_0> is |b_0>
    psi = apply_unitary(mubs5.basis("B"), mubs5.basis("A").column(0))
    assert np.abs(psi - mubs5.basis("B").column(0)).max() < 1e-14


def test_apply_unitary_preserves_norm(mubs5, rng):
    states = random_states(rng, 200, 5)
    for letter in "BCDEF":
        u = mubs5.matrix(letter)
        out = states @ u.T
        assert np.abs(np.linalg.norm(out, axis=1) - 1.0).max() <= 1e-12


def test_apply_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        apply_unitary(np.ones((5, 5)), np.array([1, 0, 0, 0, 0], dtype=complex))


def test_as_state_validates():
    with pytest.raises(ValueError):
        as_state(np.ones(5))  # not normalized
    with pytest.raises(ValueError):
        as_state(np.array([1.0, 0, 0, 0, np.nan]))
    psi = as_state(np.array([1.0, 0, 0, 0, 0]))
    assert psi.dtype == np.complex128


def test_normalize():
    v = normalize(np.array([3.0, 4.0, 0.0, 0.0]))
    assert np.linalg.norm(v) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        normalize(np.zeros(5))


def test_is_unitary(mubs4):
    assert is_unitary(mubs4.matrix("C"))
    assert not is_unitary(np.ones((4, 4)))
