import math

import numpy as np
import pytest

from conftest import random_states
from mublab.functionals import entropy_sum, evaluate
from mublab.optimize import (
    OptimizerConfig,
    OptimizationResult,
    TABLE_ROWS,
    S2_REFERENCE_AMPLITUDES,
    S2_REFERENCE_PHASE_FIFTHS,
    TWO_LOG2_5,
    minimize_sum,
    params_to_state,
    reference_state,
    reparametrized_cross_check,
    state_to_params,
    table_state,
    verify_table_states,
)

QUICK = OptimizerConfig(restarts=40, seed=7)


def test_params_endpoint_first_state():
    x = np.concatenate([np.full(4, np.pi / 2), np.zeros(4)])
    psi = params_to_state(x, 5)
    assert np.abs(psi - np.eye(5)[0]).max() < 1e-12


def test_params_endpoint_last_state(rng):
    # the last polar angle at 0 pins the state regardless of the other angles
    for _ in range(10):
        x = rng.uniform(-np.pi, np.pi, size=8)
        x[3] = 0.0
        psi = params_to_state(x, 5)
        assert abs(abs(psi[4]) - 1.0) < 1e-12


def test_params_norm_is_intrinsic(rng):
    for d in (4, 5):
        for _ in range(200):
            x = rng.uniform(-10, 10, size=2 * d - 2)
            assert abs(np.linalg.norm(params_to_state(x, d)) - 1.0) < 1e-12


def test_params_shape_validation():
    with pytest.raises(ValueError):
        params_to_state(np.zeros(7), 5)


def test_state_params_round_trip(rng):
    states = random_states(rng, 50, 5)
    for psi in states:
        back = params_to_state(state_to_params(psi), 5)
        # agreement up to the global phase gauge
        overlap = abs(np.vdot(back, psi))
        assert overlap == pytest.approx(1.0, abs=1e-10)


def test_params_reach_reference_minimizer(mubs5):
    psi = reference_state(S2_REFERENCE_AMPLITUDES, S2_REFERENCE_PHASE_FIFTHS)
    rebuilt = params_to_state(state_to_params(psi), 5)
    val = entropy_sum(rebuilt, [mubs5.basis(c) for c in "DEF"])
    assert val == pytest.approx(4.43223, abs=1e-5)


def test_minimize_entropy_s1(mubs5):
    res = minimize_sum("entropy", "ABC", mubs5, QUICK)
    assert res.converged
    assert res.minimum == pytest.approx(TWO_LOG2_5, abs=1e-3)


def test_minimize_entropy_s2(mubs5):
    res = minimize_sum("entropy", "ABE", mubs5, QUICK)
    assert res.minimum == pytest.approx(4.43223, abs=1e-3)
    # the minimizing family has a single null component in the computational basis
    assert int((np.abs(res.argmin) < 1e-3).sum()) == 1


def test_minimize_variance_d4(mubs4):
    res = minimize_sum("variance", "ABC", mubs4, OptimizerConfig(restarts=30, seed=7))
    assert res.minimum == pytest.approx(0.75, abs=1e-2)


def test_minimize_pair_floor(mubs5):
    res = minimize_sum("entropy", "AD", mubs5, OptimizerConfig(restarts=25, seed=7))
    assert res.minimum >= math.log2(5) - 1e-6
    assert res.minimum == pytest.approx(math.log2(5), abs=1e-3)


def test_argmin_reproduces_minimum(mubs5):
    res = minimize_sum("entropy", "DEF", mubs5, QUICK)
    val = evaluate("entropy", res.argmin, [mubs5.basis(c) for c in "DEF"])
    assert abs(val - res.minimum) <= 10 * QUICK.function_tolerance


def test_determinism_same_seed(mubs5):
    cfg = OptimizerConfig(restarts=10, seed=99)
    a = minimize_sum("entropy", "ACD", mubs5, cfg)
    b = minimize_sum("entropy", "ACD", mubs5, cfg)
    assert a.minimum == b.minimum
    assert np.array_equal(a.argmin, b.argmin)
    assert a.best_restart_index == b.best_restart_index
    assert a.restart_minima == b.restart_minima


def test_worker_count_does_not_change_result(mubs5):
    a = minimize_sum("entropy", "ABF", mubs5, OptimizerConfig(restarts=8, seed=3, workers=1))
    b = minimize_sum("entropy", "ABF", mubs5, OptimizerConfig(restarts=8, seed=3, workers=2))
    assert a.minimum == b.minimum and np.array_equal(a.argmin, b.argmin)


def test_multistart_best_so_far_monotone(mubs5):
    res = minimize_sum("entropy", "BCD", mubs5, OptimizerConfig(restarts=20, seed=5))
    best = np.minimum.accumulate(res.restart_minima)
    assert (np.diff(best) <= 0).all()
    assert res.minimum <= best[-1] + 1e-15


def test_entropy_minimum_never_below_zero_floor(mubs5):
    res = minimize_sum("entropy", "AB", mubs5, OptimizerConfig(restarts=10, seed=2))
    assert res.minimum >= 0.0


def test_cross_check_identity_bit_identical(mubs5):
    cfg = OptimizerConfig(restarts=10, seed=21)
    res = minimize_sum("entropy", "ABC", mubs5, cfg)
    rep = reparametrized_cross_check(res, mubs5, cfg)
    assert rep["passes"][0]["kind"] == "identity"
    assert rep["passes"][0]["bit_identical"]


def test_cross_check_agreement(mubs5):
    cfg = OptimizerConfig(restarts=30, seed=21, permutation_reparametrizations=2)
    res = minimize_sum("entropy", "DEF", mubs5, cfg)
    rep = reparametrized_cross_check(res, mubs5, cfg)
    assert rep["passed"], rep
    assert rep["max_deviation"] <= rep["agreement_tolerance"]


def test_payload_round_trips(mubs5):
    res = minimize_sum("entropy", "ABD", mubs5, OptimizerConfig(restarts=5, seed=4))
    payload = res.to_payload()
    psi = np.asarray(payload["argmin"]["re"]) + 1j * np.asarray(payload["argmin"]["im"])
    val = evaluate("entropy", psi, [mubs5.basis(c) for c in "ABD"])
    assert val == pytest.approx(payload["minimum"], abs=1e-9)
    amps = np.asarray(payload["argmin"]["amplitudes"])
    phases = np.asarray(payload["argmin"]["phases"])
    rebuilt = amps * np.exp(1j * phases)
    assert abs(abs(np.vdot(rebuilt, psi)) - 1.0) < 1e-12


def test_table_rows_all_present():
    assert sorted(TABLE_ROWS) == [
        "ABD", "ABE", "ACD", "ACF", "AEF", "BCE", "BCF", "BDF", "CDE", "DEF"]
    for amps, fifths in TABLE_ROWS.values():
        assert len(amps) == 5 and len(fifths) == 5
        assert fifths[0] == 0  # first phase gauged to zero


def test_table_states_pass(mubs5):
    rep = verify_table_states(mubs5)
    assert rep["passed"], rep["failures"]
    for triplet, val in rep["rows"].items():
        assert val <= 4.4332 + 2e-2


def test_table_states_example_rows(mubs5):
    for trip in ("ABD", "DEF"):
        val = entropy_sum(table_state(trip), [mubs5.basis(c) for c in trip])
        assert val == pytest.approx(4.432, abs=1e-3)


def test_table_states_never_beat_s1_bound(mubs5):
    from mublab.symmetry import S1_TRIPLETS

    for trip in TABLE_ROWS:
        psi = table_state(trip)
        for s1 in sorted(S1_TRIPLETS)[:3]:
            val = entropy_sum(psi, [mubs5.basis(c) for c in s1])
            assert val >= TWO_LOG2_5 - 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(function_tolerance=0.0)
