"""Construction of the complete MUB sets in dimensions 4 and 5.

The matrices are generated from integer exponent tables (powers of the
primitive fifth root of unity for d=5, powers of i for d=4) rather than
floating literals, so the only rounding is the final complex exponential.
Columns are the basis states; basis letters and column order follow the
catalog convention A..F (A..E for d=4), with A the computational basis.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .linalg import is_unitary

OMEGA = np.exp(2j * np.pi / 5)

LETTERS = {4: "ABCDE", 5: "ABCDEF"}

# d=5 exponent tables: entry (j, k) is the power of omega in row j, column k.
_EXP5 = {
    "B": [
        [0, 0, 0, 0, 0],
        [0, 1, 2, 3, 4],
        [0, 2, 4, 1, 3],
        [0, 3, 1, 4, 2],
        [0, 4, 3, 2, 1],
    ],
    "C": [
        [0, 0, 0, 0, 0],
        [1, 2, 3, 4, 0],
        [4, 1, 3, 0, 2],
        [4, 2, 0, 3, 1],
        [1, 0, 4, 3, 2],
    ],
    "D": [
        [0, 0, 0, 0, 0],
        [3, 4, 0, 1, 2],
        [2, 4, 1, 3, 0],
        [2, 0, 3, 1, 4],
        [3, 2, 1, 0, 4],
    ],
    "E": [
        [0, 0, 0, 0, 0],
        [2, 3, 4, 0, 1],
        [3, 0, 2, 4, 1],
        [3, 1, 4, 2, 0],
        [2, 1, 0, 4, 3],
    ],
    "F": [
        [0, 0, 0, 0, 0],
        [4, 0, 1, 2, 3],
        [1, 3, 0, 2, 4],
        [1, 4, 2, 0, 3],
        [4, 3, 2, 1, 0],
    ],
}

# d=4 exponent tables: entry (j, k) is the power of i (0:1, 1:i, 2:-1, 3:-i).
_EXP4 = {
    "B": [
        [0, 0, 0, 0],
        [0, 0, 2, 2],
        [0, 2, 2, 0],
        [0, 2, 0, 2],
    ],
    "C": [
        [0, 0, 0, 0],
        [0, 0, 2, 2],
        [3, 1, 1, 3],
        [1, 3, 1, 3],
    ],
    "D": [
        [0, 0, 0, 0],
        [1, 3, 1, 3],
        [2, 2, 0, 0],
        [1, 3, 3, 1],
    ],
    "E": [
        [0, 0, 0, 0],
        [1, 3, 1, 3],
        [1, 3, 3, 1],
        [2, 2, 0, 0],
    ],
}

# U^{n} applied to the Fourier basis reproduces basis T for these exponents.
PHASE_INDEX = {"B": 0, "C": 1, "E": 2, "D": 3, "F": 4}


def shift_unitary():
    """The diagonal unitary diag(1, w, w^4, w^4, w) generating C, E, D, F from B."""
    return np.diag([1.0, OMEGA, OMEGA**4, OMEGA**4, OMEGA]).astype(np.complex128)


def fourier_matrix(dim=5):
    """Fourier matrix with entries w^{jk}/sqrt(d); equals basis B for d=5."""
    j = np.arange(dim)
    w = np.exp(2j * np.pi / dim)
    return w ** np.outer(j, j) / np.sqrt(dim)


@dataclass(frozen=True)
class Basis:
    """One orthonormal basis: a letter label and a unitary whose columns are the states."""

    label: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def column(self, j):
        return self.matrix[:, j].copy()


@dataclass(frozen=True)
class MubSet:
    """The complete catalog for one dimension: 6 bases for d=5, 5 for d=4."""

    dim: int
    bases: tuple

    @classmethod
    def build(cls, dim):
        return build_mub_set(dim)

    @property
    def letters(self):
        return LETTERS[self.dim]

    def basis(self, letter):
        idx = self.letters.find(letter)
        if idx < 0:
            raise KeyError(f"no basis {letter!r} in dimension {self.dim}")
        return self.bases[idx]

    def matrix(self, letter):
        return self.basis(letter).matrix

    def conj_stack(self, letters):
        """Stack of conjugated basis matrices, the layout the kernels consume."""
        return np.ascontiguousarray(
            np.stack([self.matrix(c).conj() for c in letters])
        )

    def __iter__(self):
        return iter(self.bases)


def build_mub_set(dim):
    """Construct the full catalog of mutually unbiased bases for dim 4 or 5."""
    if dim == 5:
        mats = {"A": np.eye(5, dtype=np.complex128)}
        for letter, table in _EXP5.items():
            mats[letter] = OMEGA ** np.asarray(table, dtype=np.float64) / np.sqrt(5.0)
    elif dim == 4:
        mats = {"A": np.eye(4, dtype=np.complex128)}
        for letter, table in _EXP4.items():
            mats[letter] = (1j) ** np.asarray(table, dtype=np.float64) / 2.0
    else:
        raise ValueError(f"unsupported dimension {dim}; only 4 and 5 are built")
    bases = tuple(Basis(c, np.ascontiguousarray(mats[c])) for c in LETTERS[dim])
    return MubSet(dim=dim, bases=bases)


def verify_mutual_unbiasedness(mub_set):
    """Max deviation of |<x_i|y_j>|^2 from 1/d over all cross-basis pairs."""
    d = mub_set.dim
    worst = 0.0
    worst_pair = None
    for b1, b2 in itertools.combinations(mub_set.bases, 2):
        overlap = np.abs(b1.matrix.conj().T @ b2.matrix) ** 2
        dev = float(np.abs(overlap - 1.0 / d).max())
        if worst_pair is None or dev > worst:
            worst, worst_pair = dev, b1.label + b2.label
    unitary_ok = all(is_unitary(b.matrix) for b in mub_set.bases)
    return {
        "dim": d,
        "max_deviation": worst,
        "worst_pair": worst_pair,
        "all_unitary": unitary_ok,
        "passed": bool(unitary_ok and worst <= tol.MUB_ATOL),
    }


def verify_generating_relations(mub_set, atol=tol.RELATION_ATOL):
    """Check C = U B, E = U^2 B, D = U^3 B, F = U^4 B and U^5 = I for d=5."""
    if mub_set.dim != 5:
        raise ValueError("generating relations are defined for dimension 5 only")
    u = shift_unitary()
    b = mub_set.matrix("B")
    violations = []
    results = {}
    for letter, power in sorted(PHASE_INDEX.items()):
        if power == 0:
            continue
        err = float(np.abs(np.linalg.matrix_power(u, power) @ b - mub_set.matrix(letter)).max())
        results[letter] = err
        if err > atol:
            violations.append({"basis": letter, "power": power, "error": err})
    period_err = float(np.abs(np.linalg.matrix_power(u, 5) - np.eye(5)).max())
    fourier_err = float(np.abs(b - fourier_matrix(5)).max())
    passed = not violations and period_err <= atol and fourier_err <= atol
    return {
        "columnwise_errors": results,
        "shift_period_error": period_err,
        "fourier_equals_B_error": fourier_err,
        "violations": violations,
        "passed": bool(passed),
    }
