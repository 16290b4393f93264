import itertools

import numpy as np
import pytest

from mublab.catalog import (
    OMEGA,
    Basis,
    MubSet,
    build_mub_set,
    fourier_matrix,
    shift_unitary,
    verify_generating_relations,
    verify_mutual_unbiasedness,
)


def test_unsupported_dimension():
    with pytest.raises(ValueError):
        build_mub_set(6)


def test_basis_count(mubs5, mubs4):
    assert len(mubs5.bases) == 6 and mubs5.letters == "ABCDEF"
    assert len(mubs4.bases) == 5 and mubs4.letters == "ABCDE"


def test_computational_basis_is_identity(mubs5, mubs4):
    assert np.array_equal(mubs5.matrix("A"), np.eye(5))
    assert np.array_equal(mubs4.matrix("A"), np.eye(4))


def test_transcribed_entries(mubs5, mubs4):
    # spot values fixed by the catalog: third component of |b_2>, third of |c_0>
    assert mubs5.matrix("B")[2, 2] == pytest.approx(OMEGA**4 / np.sqrt(5), abs=1e-15)
    assert mubs4.matrix("C")[2, 0] == pytest.approx(-0.5j, abs=1e-15)


@pytest.mark.parametrize("dim", [4, 5])
def test_unbiasedness_direct(dim):
    # independent check: raw overlaps of every cross-basis pair
    mubs = build_mub_set(dim)
    worst = 0.0
    for b1, b2 in itertools.combinations(mubs.bases, 2):
        for i in range(dim):
            for j in range(dim):
                ov = abs(np.vdot(b1.matrix[:, i], b2.matrix[:, j])) ** 2
                worst = max(worst, abs(ov - 1.0 / dim))
    assert worst < 1e-12


@pytest.mark.parametrize("dim", [4, 5])
def test_unbiasedness_report(dim):
    rep = verify_mutual_unbiasedness(build_mub_set(dim))
    assert rep["passed"] and rep["max_deviation"] < 1e-12


def test_every_basis_unitary(mubs5, mubs4):
    for mubs in (mubs5, mubs4):
        for b in mubs:
            gram = b.matrix.conj().T @ b.matrix
            assert np.abs(gram - np.eye(mubs.dim)).max() <= 1e-10


def test_duplicate_basis_detected(mubs5):
    # replacing one basis with a second identity is maximally biased
    tampered = MubSet(dim=5, bases=(
        mubs5.bases[0],
        Basis("B", np.eye(5, dtype=complex)),
        *mubs5.bases[2:],
    ))
    rep = verify_mutual_unbiasedness(tampered)
    assert not rep["passed"]
    assert rep["max_deviation"] == pytest.approx(1 - 1 / 5, abs=1e-12)


def test_generating_relations(mubs5):
    rep = verify_generating_relations(mubs5)
    assert rep["passed"]
    assert all(err < 1e-12 for err in rep["columnwise_errors"].values())
    assert rep["shift_period_error"] < 1e-12
    assert rep["fourier_equals_B_error"] < 1e-12


def test_generating_relations_direct(mubs5):
    u = shift_unitary()
    b = mubs5.matrix("B")
    for letter, power in [("C", 1), ("E", 2), ("D", 3), ("F", 4)]:
        assert np.abs(np.linalg.matrix_power(u, power) @ b - mubs5.matrix(letter)).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(u, 5) - np.eye(5)).max() < 1e-12


def test_generating_relations_reject_tampered(mubs5):
    bad = mubs5.matrix("C").copy()
    bad[1, 1] *= -1.0
    tampered = MubSet(dim=5, bases=tuple(
        Basis("C", bad) if b.label == "C" else b for b in mubs5.bases
    ))
    rep = verify_generating_relations(tampered)
    assert not rep["passed"] and rep["violations"]


def test_generating_relations_dim4_rejected(mubs4):
    with pytest.raises(ValueError):
        verify_generating_relations(mubs4)


def test_fourier_matrix_equals_B(mubs5):
    assert np.abs(fourier_matrix(5) - mubs5.matrix("B")).max() < 1e-15


def test_conj_stack_layout(mubs5):
    stack = mubs5.conj_stack("ACE")
    assert stack.shape == (3, 5, 5)
    assert np.array_equal(stack[1], mubs5.matrix("C").conj())


def test_basis_lookup_errors(mubs4):
    with pytest.raises(KeyError):
        mubs4.basis("F")
