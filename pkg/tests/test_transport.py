import numpy as np
import pytest

from oceval import (
    BoundingBox,
    ConfigError,
    Detection,
    GroundTruthInstance,
    OcCostParams,
    ValidationError,
    brute_force_solve,
    build_problem,
    solve,
)
from oceval.costs import CostMatrix, SupplyDemand

from conftest import random_scene

BOX = BoundingBox(0, 0, 10, 10)


def problem(entries, supplies, demands):
    entries = np.asarray(entries, dtype=np.float64)
    cm = CostMatrix(entries=entries, m=entries.shape[0] - 1, n=entries.shape[1] - 1)
    sd = SupplyDemand(
        supplies=np.asarray(supplies, dtype=np.int64),
        demands=np.asarray(demands, dtype=np.int64),
    )
    return cm, sd


def test_perfect_single_plan():
    cm, sd = build_problem([Detection(BOX, 1, 1.0)], [GroundTruthInstance(BOX, 1)], OcCostParams())
    plan = solve(cm, sd)
    # real match plus the dummy-dummy unit
    assert plan.objective == pytest.approx(0.6)
    assert plan.matched_pairs == 1
    np.testing.assert_array_equal(plan.flows, [[1, 0], [0, 1]])


def test_no_detections_plan():
    gts = [GroundTruthInstance(BOX, 1), GroundTruthInstance(BoundingBox(20, 0, 30, 10), 2)]
    cm, sd = build_problem([], gts, OcCostParams())
    plan = solve(cm, sd)
    assert plan.objective == pytest.approx(1.2)
    assert plan.matched_pairs == 0
    np.testing.assert_array_equal(plan.flows, [[1, 1, 0]])


def test_empty_problem():
    cm, sd = build_problem([], [], OcCostParams())
    plan = solve(cm, sd)
    assert plan.objective == 0.0
    assert plan.matched_pairs == 0


def test_tie_prefers_more_matches():
    # matching det->gt costs exactly beta, same objective as leaving both
    # unmatched; the plan must take the match
    cm, sd = problem([[0.6, 0.6], [0.6, 0.6]], [1, 1], [1, 1])
    plan = solve(cm, sd)
    assert plan.matched_pairs == 1
    oracle = brute_force_solve(cm, sd)
    assert oracle.matched_pairs == 1
    assert plan.objective == pytest.approx(oracle.objective)


def test_oracle_enumerates_exactly():
    # 2x2 real block with a clear best assignment
    cm, sd = problem(
        [[0.1, 0.9, 0.6], [0.9, 0.2, 0.6], [0.6, 0.6, 0.6]],
        [1, 1, 2],
        [1, 1, 2],
    )
    plan = brute_force_solve(cm, sd)
    # match both: 0.1 + 0.2 + 2 dummy-dummy units at 0.6
    assert plan.objective == pytest.approx(0.1 + 0.2 + 1.2)
    assert plan.matched_pairs == 2


def test_oracle_size_limit():
    entries = np.full((8, 8), 0.5)
    supplies = [1] * 7 + [7]
    demands = [1] * 7 + [7]
    cm, sd = problem(entries, supplies, demands)
    with pytest.raises(ConfigError):
        brute_force_solve(cm, sd)


def test_validation_rejects_nan_and_negative():
    cm, sd = problem([[0.1, 0.6], [0.6, 0.6]], [1, 1], [1, 1])
    bad = cm.entries.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValidationError):
        solve(CostMatrix(bad, 1, 1), sd)
    bad = cm.entries.copy()
    bad[0, 0] = -0.2
    with pytest.raises(ValidationError):
        solve(CostMatrix(bad, 1, 1), sd)


def test_validation_rejects_unbalanced():
    cm, _ = problem([[0.1, 0.6], [0.6, 0.6]], [1, 1], [1, 1])
    sd = SupplyDemand(
        supplies=np.asarray([1, 5], dtype=np.int64),
        demands=np.asarray([1, 1], dtype=np.int64),
    )
    with pytest.raises(ConfigError):
        solve(cm, sd)


def test_solver_matches_oracle_on_random_scenes(rng):
    for _ in range(200):
        dets, gts = random_scene(rng)
        for params in (OcCostParams(0.5, 0.6), OcCostParams(1.0, 0.3)):
            cm, sd = build_problem(dets, gts, params)
            plan = solve(cm, sd)
            oracle = brute_force_solve(cm, sd)
            assert plan.objective == pytest.approx(oracle.objective, abs=1e-9)
            assert plan.matched_pairs == oracle.matched_pairs


def test_flows_are_a_valid_transport_plan(rng):
    for _ in range(100):
        dets, gts = random_scene(rng)
        cm, sd = build_problem(dets, gts, OcCostParams())
        plan = solve(cm, sd)
        np.testing.assert_array_equal(plan.flows.sum(axis=1), sd.supplies)
        np.testing.assert_array_equal(plan.flows.sum(axis=0), sd.demands)
        assert (plan.flows >= 0).all()
