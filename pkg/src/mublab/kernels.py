"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is picked once at import time from the MUBLAB_BACKEND
environment variable: "numba" (default when importable) or "numpy".
Both implementations stay importable for the equivalence tests and the
benchmark in benchmarks/bench_kernels.py.

Conventions: states are complex128 rows of shape (d,) or batches (n, d);
basis stacks are conjugated matrices of shape (k, d, d) as produced by
MubSet.conj_stack, so that amplitudes are states @ stack[b].
"""

import os
from types import SimpleNamespace

import numpy as np

BACKEND_ENV = "MUBLAB_BACKEND"

_P_FLOOR = 1e-15  # probabilities below this contribute exactly 0 to the entropy


# ---------------------------------------------------------------- numpy path

def _np_params_to_state(x, d):
    sins = np.sin(x[: d - 1])
    coss = np.cos(x[: d - 1])
    amp = np.empty(d)
    prod = 1.0
    for j in range(d - 1, 0, -1):
        amp[j] = coss[j - 1] * prod
        prod *= sins[j - 1]
    amp[0] = prod
    psi = amp.astype(np.complex128)
    psi[1:] *= np.exp(1j * x[d - 1 :])
    return psi


def _np_born_probs_block(states, mconj):
    amp = states @ mconj
    return amp.real**2 + amp.imag**2


def _np_entropy_sum_block(states, stack):
    out = np.zeros(states.shape[0])
    for b in range(stack.shape[0]):
        p = _np_born_probs_block(states, stack[b])
        safe = np.where(p > _P_FLOOR, p, 1.0)
        out -= (safe * np.log2(safe)).sum(axis=1)
    return out


def _np_variance_sum_block(states, stack, perms):
    pf = perms.astype(np.float64)
    pf2 = pf * pf
    out = np.zeros(states.shape[0])
    for b in range(stack.shape[0]):
        p = _np_born_probs_block(states, stack[b])
        e1 = p @ pf.T
        e2 = p @ pf2.T
        out += (e2 - e1 * e1).min(axis=1)
    return out


def _np_entropy_objective(x, stack):
    d = stack.shape[1]
    psi = _np_params_to_state(x, d)
    return float(_np_entropy_sum_block(psi[None, :], stack)[0])


def _np_variance_objective(x, stack, perms):
    d = stack.shape[1]
    psi = _np_params_to_state(x, d)
    return float(_np_variance_sum_block(psi[None, :], stack, perms)[0])


def numpy_impl():
    return SimpleNamespace(
        name="numpy",
        params_to_state=_np_params_to_state,
        born_probs_block=_np_born_probs_block,
        entropy_sum_block=_np_entropy_sum_block,
        variance_sum_block=_np_variance_sum_block,
        entropy_objective=_np_entropy_objective,
        variance_objective=_np_variance_objective,
    )


# ---------------------------------------------------------------- numba path

def numba_impl():
    """Build the jitted implementations; returns None when numba is unavailable."""
    try:
        from numba import njit
    except ImportError:
        return None

    @njit(cache=True, nogil=True)
    def params_to_state(x, d):
        sins = np.empty(d - 1)
        coss = np.empty(d - 1)
        for j in range(d - 1):
            sins[j] = np.sin(x[j])
            coss[j] = np.cos(x[j])
        amp = np.empty(d)
        prod = 1.0
        for j in range(d - 1, 0, -1):
            amp[j] = coss[j - 1] * prod
            prod *= sins[j - 1]
        amp[0] = prod
        psi = np.empty(d, dtype=np.complex128)
        psi[0] = amp[0]
        for j in range(1, d):
            ph = x[d - 2 + j]
            psi[j] = amp[j] * complex(np.cos(ph), np.sin(ph))
        return psi

    @njit(cache=True, nogil=True)
    def born_probs_block(states, mconj):
        n, d = states.shape
        out = np.empty((n, d))
        for s in range(n):
            for j in range(d):
                z = 0.0 + 0.0j
                for i in range(d):
                    z += states[s, i] * mconj[i, j]
                out[s, j] = z.real * z.real + z.imag * z.imag
        return out

    @njit(cache=True, nogil=True)
    def entropy_sum_block(states, stack):
        n, d = states.shape
        nb = stack.shape[0]
        out = np.empty(n)
        for s in range(n):
            total = 0.0
            for b in range(nb):
                for j in range(d):
                    z = 0.0 + 0.0j
                    for i in range(d):
                        z += states[s, i] * stack[b, i, j]
                    p = z.real * z.real + z.imag * z.imag
                    if p > _P_FLOOR:
                        total -= p * np.log2(p)
            out[s] = total
        return out

    @njit(cache=True, nogil=True)
    def variance_sum_block(states, stack, perms):
        n, d = states.shape
        nb = stack.shape[0]
        nperm = perms.shape[0]
        out = np.empty(n)
        pvec = np.empty(d)
        for s in range(n):
            total = 0.0
            for b in range(nb):
                for j in range(d):
                    z = 0.0 + 0.0j
                    for i in range(d):
                        z += states[s, i] * stack[b, i, j]
                    pvec[j] = z.real * z.real + z.imag * z.imag
                best = np.inf
                for ip in range(nperm):
                    e1 = 0.0
                    e2 = 0.0
                    for j in range(d):
                        v = float(perms[ip, j])
                        e1 += pvec[j] * v
                        e2 += pvec[j] * v * v
                    var = e2 - e1 * e1
                    if var < best:
                        best = var
                total += best
            out[s] = total
        return out

    @njit(cache=True, nogil=True)
    def entropy_objective(x, stack):
        d = stack.shape[1]
        psi = params_to_state(x, d)
        total = 0.0
        for b in range(stack.shape[0]):
            for j in range(d):
                z = 0.0 + 0.0j
                for i in range(d):
                    z += psi[i] * stack[b, i, j]
                p = z.real * z.real + z.imag * z.imag
                if p > _P_FLOOR:
                    total -= p * np.log2(p)
        return total

    @njit(cache=True, nogil=True)
    def variance_objective(x, stack, perms):
        d = stack.shape[1]
        psi = params_to_state(x, d)
        pvec = np.empty(d)
        total = 0.0
        for b in range(stack.shape[0]):
            for j in range(d):
                z = 0.0 + 0.0j
                for i in range(d):
                    z += psi[i] * stack[b, i, j]
                pvec[j] = z.real * z.real + z.imag * z.imag
            best = np.inf
            for ip in range(perms.shape[0]):
                e1 = 0.0
                e2 = 0.0
                for j in range(d):
                    v = float(perms[ip, j])
                    e1 += pvec[j] * v
                    e2 += pvec[j] * v * v
                var = e2 - e1 * e1
                if var < best:
                    best = var
            total += best
        return total

    return SimpleNamespace(
        name="numba",
        params_to_state=params_to_state,
        born_probs_block=born_probs_block,
        entropy_sum_block=entropy_sum_block,
        variance_sum_block=variance_sum_block,
        entropy_objective=entropy_objective,
        variance_objective=variance_objective,
    )


def _select_backend():
    choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        return numpy_impl()
    impl = numba_impl()
    if impl is None:
        if choice == "numba":
            raise ImportError("MUBLAB_BACKEND=numba but numba is not importable")
        return numpy_impl()
    return impl


ACTIVE = _select_backend()
BACKEND = ACTIVE.name

params_to_state = ACTIVE.params_to_state
born_probs_block = ACTIVE.born_probs_block
entropy_sum_block = ACTIVE.entropy_sum_block
variance_sum_block = ACTIVE.variance_sum_block
entropy_objective = ACTIVE.entropy_objective
variance_objective = ACTIVE.variance_objective
