"""Imperfect-measurement models: POVMs with cross-talk and bootstrap error bars.

A noisy channel set is the convex mixture (1-eps) |x_g><x_g| + eps M_g
where {M_g} is a random positive decomposition of the identity (Wishart
blocks whitened by their sum), so completeness and positivity hold by
construction.  The measured cross-talk on the basis eigenstates then
comes out at eps within a factor (1 - 1/d) set by the diagonal weight of
the random completion.
"""

from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .functionals import shannon_entropy
from .linalg import born_probabilities

MIN_EPSILON_PAPER = 0.005  # characterized cross-talk, computational basis
MAX_EPSILON_PAPER = 0.019  # characterized cross-talk, last catalog basis


def paper_epsilon_profile(dim=5):
    """Per-basis cross-talk levels interpolated across the catalog order."""
    letters = "ABCDEF"[: dim + 1]
    eps = np.linspace(MIN_EPSILON_PAPER, MAX_EPSILON_PAPER, len(letters))
    return {c: float(e) for c, e in zip(letters, eps)}


def ideal_povm(basis):
    """Rank-1 projectors onto the basis columns; completeness holds exactly."""
    m = getattr(basis, "matrix", basis)
    return [np.outer(m[:, g], m[:, g].conj()) for g in range(m.shape[1])]


def _random_positive_completion(dim, rng):
    # Wishart blocks whitened by their sum: PSD elements that resolve the identity
    for _ in range(64):
        blocks = []
        for _g in range(dim):
            a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            blocks.append(a @ a.conj().T)
        total = np.sum(blocks, axis=0)
        evals, evecs = np.linalg.eigh(total)
        if evals.min() <= 1e-10:
            continue  # singular draw; resample
        whiten = evecs @ np.diag(evals**-0.5) @ evecs.conj().T
        return [whiten @ b @ whiten for b in blocks]
    raise RuntimeError("could not draw a positive completion")


def noisy_povm(basis, epsilon, rng):
    """Channel operators (1-eps)|g><g| + eps M_g with a random positive completion."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must be in [0, 1)")
    ideal = ideal_povm(basis)
    if epsilon == 0.0:
        return ideal
    d = ideal[0].shape[0]
    completion = _random_positive_completion(d, rng)
    elements = [(1.0 - epsilon) * p + epsilon * m for p, m in zip(ideal, completion)]
    for el in elements:
        herm = np.abs(el - el.conj().T).max()
        if herm > tol.HERMITICITY_ATOL:
            raise RuntimeError(f"non-Hermitian POVM element ({herm})")
        if np.linalg.eigvalsh(el).min() < tol.POVM_EIGENVALUE_ATOL:
            raise RuntimeError("POVM element not positive semidefinite")
    total = np.sum(elements, axis=0)
    if np.abs(total - np.eye(d)).max() > tol.POVM_COMPLETENESS_ATOL:
        raise RuntimeError("POVM completeness violated")
    return elements


@dataclass(frozen=True)
class DetectorModel:
    """Per-basis channel operators plus the cross-talk levels used to draw them."""

    dim: int
    letters: str
    elements: dict = field(repr=False)  # letter -> ndarray (d, d, d)
    epsilons: dict

    def povm(self, letter):
        return self.elements[letter]


def build_model(mub_set, letters, epsilons, seed):
    """Draw a detector model for the given bases; eps may be a dict or one float."""
    letters = "".join(letters)
    if isinstance(epsilons, dict):
        eps_map = {c: float(epsilons[c]) for c in letters}
    else:
        eps_map = {c: float(epsilons) for c in letters}
    elements = {}
    for k, c in enumerate(letters):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))
        elements[c] = np.stack(noisy_povm(mub_set.basis(c), eps_map[c], rng))
    return DetectorModel(dim=mub_set.dim, letters=letters, elements=elements,
                         epsilons=eps_map)


def povm_probabilities(psi, elements):
    """Outcome distribution p_g = <psi| pi_g |psi>, clamped at zero."""
    psi = np.asarray(psi, dtype=np.complex128)
    p = np.einsum("i,gij,j->g", psi.conj(), elements, psi, optimize=True).real
    return np.where(p < 0.0, 0.0, p)


def measured_cross_talk(elements, basis):
    """Average off-channel detection probability over the basis eigenstates."""
    m = getattr(basis, "matrix", basis)
    d = m.shape[0]
    total = 0.0
    for i in range(d):
        p = povm_probabilities(m[:, i], elements)
        total += p.sum() - p[i]
    return total / d


def predict_entropy_sum(psi, letters, model):
    """Entropy sum a detector described by `model` would report for psi."""
    return sum(shannon_entropy(povm_probabilities(psi, model.povm(c))) for c in letters)


def ideal_entropy_sum(psi, letters, mub_set):
    return sum(shannon_entropy(born_probabilities(psi, mub_set.basis(c))) for c in letters)


@dataclass(frozen=True)
class CountRecord:
    """Detected counts in one basis; per-channel spreads default to shot noise."""

    counts: np.ndarray
    total: int
    std: np.ndarray = None

    @classmethod
    def from_counts(cls, counts, std=None):
        counts = np.asarray(counts, dtype=np.int64)
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        total = int(counts.sum())
        if std is None:
            std = np.sqrt(counts.astype(np.float64))
        else:
            std = np.asarray(std, dtype=np.float64)
        return cls(counts=counts, total=total, std=std)


def expected_counts(psi, model, shots):
    """Expected (rounded) counts per basis for one probe state."""
    out = []
    for c in model.letters:
        p = povm_probabilities(psi, model.povm(c))
        out.append(CountRecord.from_counts(np.rint(p * shots).astype(np.int64)))
    return out


def bootstrap_entropy_error(counts_per_basis, resamples=500, rng=None):
    """10th-90th percentile band of the entropy sum under count resampling.

    Each channel is redrawn independently from a normal with the recorded
    mean and spread, clamped at zero, and the vector renormalized.
    """
    if resamples < 2:
        raise ValueError("resamples must be >= 2")
    if rng is None:
        rng = np.random.default_rng(0)
    sums = np.zeros(resamples)
    for rec in counts_per_basis:
        if rec.total <= 0:
            raise ValueError("zero total counts")
        draws = rng.normal(rec.counts.astype(np.float64), rec.std, size=(resamples, len(rec.counts)))
        np.clip(draws, 0.0, None, out=draws)
        norms = draws.sum(axis=1)
        dead = norms <= 0.0
        if dead.any():  # all channels clamped away; fall back to the recorded distribution
            draws[dead] = rec.counts
            norms[dead] = rec.total
        p = draws / norms[:, None]
        safe = np.where(p > tol.ENTROPY_ZERO_CUTOFF, p, 1.0)
        sums += -(safe * np.log2(safe)).sum(axis=1)
    low, high = np.percentile(sums, [10.0, 90.0])
    return float(low), float(high)
