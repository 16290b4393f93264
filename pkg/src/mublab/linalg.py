"""Dense complex linear algebra for the fixed dimensions 4 and 5.

States are plain complex128 ndarrays of shape (d,), bases are d x d
unitaries whose columns are the basis states.  Everything here is pure and
allocation-light; the batch versions of the hot paths live in kernels.py.
"""

import numpy as np

from . import tolerances as tol

SUPPORTED_DIMS = (4, 5)


def as_state(values, dim=None):
    """Validate and return a normalized state vector as complex128."""
    psi = np.asarray(values, dtype=np.complex128)
    if psi.ndim != 1 or psi.shape[0] not in SUPPORTED_DIMS:
        raise ValueError(f"state must be a vector of dimension 4 or 5, got shape {psi.shape}")
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {psi.shape[0]}")
    if not np.all(np.isfinite(psi.view(np.float64))):
        raise ValueError("state contains non-finite amplitudes")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol.NORM_ATOL:
        raise ValueError(f"state is not normalized: ||psi|| = {nrm!r}")
    return psi


def normalize(values):
    """Scale a nonzero complex vector to unit norm."""
    psi = np.asarray(values, dtype=np.complex128)
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return psi / nrm


def inner_product(x, y):
    """<x|y> with conjugation on the first argument."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return complex(np.vdot(x, y))


def is_unitary(matrix, atol=tol.UNITARY_ATOL):
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() <= atol)


def _basis_matrix(basis):
    # accepts a Basis (catalog.py) or a raw matrix
    return getattr(basis, "matrix", basis)


def born_probabilities(psi, basis):
    """Outcome distribution p_j = |<basis_j|psi>|^2, clamped and validated."""
    m = np.asarray(_basis_matrix(basis), dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if m.shape[0] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: basis {m.shape} vs state {psi.shape}")
    amp = m.conj().T @ psi
    p = amp.real**2 + amp.imag**2
    if p.min() < tol.PROB_CLAMP:
        raise ValueError(f"negative probability beyond round-off: {p.min()!r}")
    p = np.where(p < 0.0, 0.0, p)
    s = p.sum()
    if abs(s - 1.0) > tol.PROB_SUM_ATOL:
        raise ValueError(f"probabilities do not sum to 1: {s!r}")
    return p


def apply_unitary(unitary, psi):
    """U |psi>, rejecting non-unitary input."""
    u = np.asarray(_basis_matrix(unitary), dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if u.shape[1] != psi.shape[0]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {psi.shape}")
    if not is_unitary(u):
        raise ValueError("matrix is not unitary within tolerance")
    return u @ psi
