"""Uncertainty quantifiers: Shannon entropy sums and permutation-minimized variances.

Eigenvalues for the variance are the integers 0..d-1 attached to the basis
states through a permutation; the variance is minimized exhaustively over
all d! assignments (d <= 5, so at most 120).
"""

import itertools
from functools import lru_cache

import numpy as np

from . import tolerances as tol
from .linalg import born_probabilities

FUNCTIONAL_KINDS = ("entropy", "variance")


@lru_cache(maxsize=None)
def permutation_table(d):
    """All permutations of 0..d-1 as an int64 array of shape (d!, d)."""
    return np.array(list(itertools.permutations(range(d))), dtype=np.int64)


def shannon_entropy(p):
    """Entropy in bits; terms with p_j below the zero cutoff contribute exactly 0."""
    p = np.asarray(p, dtype=np.float64)
    safe = np.where(p > tol.ENTROPY_ZERO_CUTOFF, p, 1.0)
    return float(-(safe * np.log2(safe)).sum())


def entropy_sum(psi, bases):
    """Sum of outcome entropies of psi over a tuple of bases."""
    return sum(shannon_entropy(born_probabilities(psi, b)) for b in bases)


def min_variance(psi, basis, eigenvalues=None):
    """Smallest variance over all eigenvalue permutations.

    Returns (value, best_perm) where best_perm[j] is the eigenvalue index
    attached to basis state j.  The default eigenvalues are 0..d-1; the
    result is invariant under shifting them.
    """
    p = born_probabilities(psi, basis)
    d = p.shape[0]
    if eigenvalues is None:
        eigenvalues = np.arange(d, dtype=np.float64)
    else:
        eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    perms = permutation_table(d)
    vals = eigenvalues[perms]
    e1 = vals @ p
    e2 = (vals * vals) @ p
    variances = e2 - e1 * e1
    best = int(np.argmin(variances))
    return max(float(variances[best]), 0.0), tuple(int(v) for v in perms[best])


def variance_sum(psi, bases):
    """Sum over bases of the permutation-minimized variance."""
    return sum(min_variance(psi, b)[0] for b in bases)


def evaluate(kind, psi, bases):
    """Evaluate one of the two quantifier sums by name."""
    if kind == "entropy":
        return entropy_sum(psi, bases)
    if kind == "variance":
        return variance_sum(psi, bases)
    raise ValueError(f"unknown functional kind {kind!r}; expected one of {FUNCTIONAL_KINDS}")
