"""Haar-measure sampling at scale with mergeable histograms.

Sample index i always draws its state from the Philox stream keyed by
(seed, i // BLOCK_SIZE) at offset i % BLOCK_SIZE, so a scan's result is
bit-identical regardless of how blocks are split across workers or runs.
Each state is d independent standard complex Gaussians, normalized.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .functionals import permutation_table
from .symmetry import class_bound, classify_triplet

BLOCK_SIZE = 65536  # granularity of the per-block RNG streams; fixed by the format

DEFAULT_BIN_COUNT = 250
RANGE_PAD = 0.05


def _block_rng(seed, block_index):
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))
    )


def haar_random_state(rng, dim):
    """One Haar-distributed pure state from an initialized Generator."""
    z = rng.standard_normal(2 * dim)
    psi = z[:dim] + 1j * z[dim:]
    return psi / np.linalg.norm(psi)


def haar_block(seed, block_index, dim, count=BLOCK_SIZE):
    """The first `count` Haar states of one stream block, shape (count, dim)."""
    if not 0 < count <= BLOCK_SIZE:
        raise ValueError(f"count must be in 1..{BLOCK_SIZE}")
    rng = _block_rng(seed, block_index)
    z = rng.standard_normal((count, 2 * dim))
    states = z[:, :dim] + 1j * z[:, dim:]
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    return states


@dataclass
class Histogram:
    """Fixed-width binned counts with extreme-value records and running moments."""

    bin_count: int
    lo: float
    hi: float
    counts: np.ndarray = field(repr=False, default=None)
    min_seen: float = math.inf
    max_seen: float = -math.inf
    min_state: np.ndarray = field(repr=False, default=None)
    sum: float = 0.0
    sum_sq: float = 0.0

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros(self.bin_count, dtype=np.int64)
        if self.hi <= self.lo:
            raise ValueError("histogram range must have hi > lo")

    @property
    def samples(self):
        return int(self.counts.sum())

    @property
    def mean(self):
        n = self.samples
        return self.sum / n if n else math.nan

    def bin_edges(self):
        return np.linspace(self.lo, self.hi, self.bin_count + 1)

    def accumulate(self, values, states):
        """Fold one block of functional values (out-of-range values clamp to edge bins)."""
        idx = np.floor((values - self.lo) / (self.hi - self.lo) * self.bin_count).astype(np.int64)
        np.clip(idx, 0, self.bin_count - 1, out=idx)
        self.counts += np.bincount(idx, minlength=self.bin_count)
        k = int(np.argmin(values))
        if values[k] < self.min_seen:
            self.min_seen = float(values[k])
            self.min_state = states[k].copy()
        self.max_seen = max(self.max_seen, float(values.max()))
        self.sum += float(values.sum())
        self.sum_sq += float((values * values).sum())


def _smaller_state(a, b):
    # deterministic tie-break so merge stays commutative on identical minima
    if a is None:
        return b
    if b is None:
        return a
    return a if a.tobytes() <= b.tobytes() else b


def merge(h1, h2):
    """Combine two histograms with identical binning; associative and commutative."""
    if (h1.bin_count, h1.lo, h1.hi) != (h2.bin_count, h2.lo, h2.hi):
        raise ValueError("incompatible binning")
    out = Histogram(h1.bin_count, h1.lo, h1.hi, counts=h1.counts + h2.counts)
    out.sum = h1.sum + h2.sum
    out.sum_sq = h1.sum_sq + h2.sum_sq
    out.max_seen = max(h1.max_seen, h2.max_seen)
    if h1.min_seen < h2.min_seen:
        out.min_seen, out.min_state = h1.min_seen, h1.min_state
    elif h2.min_seen < h1.min_seen:
        out.min_seen, out.min_state = h2.min_seen, h2.min_state
    else:
        out.min_seen = h1.min_seen
        out.min_state = _smaller_state(h1.min_state, h2.min_state)
    return out


@dataclass
class ScanReport:
    functional: str
    bases: str
    dim: int
    samples: int
    seed: int
    histogram: Histogram
    runtime_s: float

    @property
    def mean(self):
        return self.histogram.mean

    def to_payload(self):
        h = self.histogram
        state = h.min_state
        return {
            "functional": self.functional,
            "bases": self.bases,
            "dim": self.dim,
            "samples": self.samples,
            "seed": self.seed,
            "bin_count": h.bin_count,
            "range": [h.lo, h.hi],
            "counts": [int(c) for c in h.counts],
            "min_seen": h.min_seen,
            "max_seen": h.max_seen,
            "mean": h.mean,
            "min_state": None if state is None else {
                "re": [float(z.real) for z in state],
                "im": [float(z.imag) for z in state],
            },
        }


def default_range(kind, letters, dim):
    """Histogram range [class bound - pad, value at the uniform distribution + pad]."""
    k = len(letters)
    if kind == "entropy":
        lo = class_bound(letters, dim, "entropy") if k == 3 else (
            math.log2(dim) if k == 2 else 0.0)
        hi = k * math.log2(dim)
    else:
        lo = class_bound(letters, dim, "variance") if k == 3 else 0.0
        hi = k * (dim * dim - 1) / 12.0  # variance of the uniform distribution per basis
    return lo - RANGE_PAD, hi + RANGE_PAD


def _functional_values(kind, states, stack, perms):
    if kind == "entropy":
        return kernels.entropy_sum_block(states, stack)
    return kernels.variance_sum_block(states, stack, perms)


def scan(kind, letters, mub_set, samples, seed, workers=1,
         bin_count=DEFAULT_BIN_COUNT, value_range=None, sample_offset=0):
    """Histogram a functional over Haar-random states.

    `sample_offset` shifts the absolute sample index range to
    [offset, offset + samples), which lets disjoint scans be merged into
    exactly the histogram a single contiguous scan would produce.
    """
    letters = "".join(letters)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    stack = mub_set.conj_stack(letters)
    d = mub_set.dim
    perms = permutation_table(d) if kind == "variance" else None
    if value_range is None:
        value_range = default_range(kind, letters, d)
    lo, hi = value_range

    first = sample_offset // BLOCK_SIZE
    last = (sample_offset + samples - 1) // BLOCK_SIZE
    spans = []
    for b in range(first, last + 1):
        i0 = max(sample_offset, b * BLOCK_SIZE)
        i1 = min(sample_offset + samples, (b + 1) * BLOCK_SIZE)
        spans.append((b, i0 - b * BLOCK_SIZE, i1 - b * BLOCK_SIZE))

    def run_span(span):
        b, j0, j1 = span
        states = haar_block(seed, b, d, count=j1)[j0:]
        values = _functional_values(kind, states, stack, perms)
        h = Histogram(bin_count, lo, hi)
        h.accumulate(values, states)
        return h

    t0 = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_span, spans))
    else:
        parts = [run_span(s) for s in spans]
    total = parts[0]
    for part in parts[1:]:
        total = merge(total, part)
    runtime = time.perf_counter() - t0

    return ScanReport(
        functional=kind, bases=letters, dim=d, samples=samples, seed=seed,
        histogram=total, runtime_s=runtime,
    )


def triplet_class_of(letters, dim):
    return classify_triplet(letters, dim)
