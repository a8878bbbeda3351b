"""Simulated campaign driver and the optimizer-vs-random benchmark."""
from __future__ import annotations

import math

import numpy as np
import pytest

from expopt import bench
from expopt.bench import (
    CampaignSummary,
    benchmark,
    make_config,
    run_simulated_campaign,
    seed_design,
)
from expopt.campaign import TERMINAL_STATUSES, export_trace
from expopt.simulator import BUILTIN_PROCESSES, BUILTIN_TARGETS, default_space


def _target1():
    return BUILTIN_PROCESSES["target1_achievable"](), BUILTIN_TARGETS["target1_achievable"]


# seed design


def test_seed_design_covers_every_level() -> None:
    space = default_space()
    for seed in range(5):
        points = seed_design(space, 5, np.random.default_rng(seed))
        assert len(points) == 5
        for j, dim in enumerate(space.dims):
            seen = {p.coords[j] for p in points}
            assert seen == set(dim.levels)


def test_seed_design_rows_distinct_and_on_grid() -> None:
    space = default_space()
    points = seed_design(space, 7, np.random.default_rng(3))
    rows = [tuple(p.coords) for p in points]
    assert len(set(rows)) == 7
    for p in points:
        space.validate(p)


def test_seed_design_deterministic() -> None:
    space = default_space()
    a = seed_design(space, 5, np.random.default_rng(42))
    b = seed_design(space, 5, np.random.default_rng(42))
    assert [tuple(p.coords) for p in a] == [tuple(p.coords) for p in b]


# simulated campaigns


def test_simulated_campaign_reaches_terminal_state() -> None:
    process, targets = _target1()
    state, summary = run_simulated_campaign(process, targets, budget=20, seed=0)
    assert state.status in TERMINAL_STATUSES
    assert isinstance(summary, CampaignSummary)
    assert summary.total_observations == len(state.observations)
    assert summary.iterations == state.iterations_done
    trace = export_trace(state)
    assert len(trace.rows) == summary.total_observations
    assert summary.best_found == trace.column("BFV")[-1]


def test_simulated_campaign_converges_on_achievable_process() -> None:
    process, targets = _target1()
    _, summary = run_simulated_campaign(process, targets, budget=20, seed=0)
    assert summary.converged
    assert summary.final_l_pct <= 20.0
    assert summary.final_d_pct <= 20.0


def test_simulated_campaign_is_deterministic() -> None:
    process, targets = _target1()
    state_a, summary_a = run_simulated_campaign(process, targets, budget=8, seed=5)
    state_b, summary_b = run_simulated_campaign(process, targets, budget=8, seed=5)
    assert summary_a == summary_b
    assert export_trace(state_a) == export_trace(state_b)


def test_different_seeds_differ() -> None:
    process, targets = _target1()
    state_a, _ = run_simulated_campaign(process, targets, budget=5, seed=1)
    state_b, _ = run_simulated_campaign(process, targets, budget=5, seed=2)
    assert export_trace(state_a) != export_trace(state_b)


def test_make_config_shape() -> None:
    process, targets = _target1()
    config = make_config(process, targets, budget=12, seed=9, seed_count=4)
    assert config.iteration_budget == 12
    assert config.seed_count == 4
    assert config.rng_seed == 9
    assert config.gp.kernel.lengthscale == 0.25
    assert not config.gp.select_lengthscale


def test_iterations_to_bfv_points_at_first_minimum() -> None:
    process, targets = _target1()
    state, summary = run_simulated_campaign(process, targets, budget=10, seed=3)
    bfv = export_trace(state).column("BFV")
    k = summary.iterations_to_bfv
    assert bfv[k - 1] == bfv[-1]
    assert all(v > bfv[-1] for v in bfv[: k - 1])


# benchmark


def test_benchmark_single_repeat_structure() -> None:
    process, targets = _target1()
    report = benchmark(process, targets, repeats=1, seed=0, budget=10)
    assert report.repeats == 1
    assert report.optimizer.name == "optimizer"
    assert report.random.name == "random"
    assert len(report.optimizer.iterations_to_success) == 1
    assert len(report.random.iterations_to_success) == 1
    assert 0.0 <= report.optimizer.success_rate <= 1.0
    data = report.to_dict()
    assert [m["name"] for m in data["methods"]] == ["optimizer", "random"]


def test_benchmark_random_with_full_grid_budget_always_succeeds() -> None:
    # 162 draws without replacement cover the whole grid, so the single
    # feasible setting is always visited
    process, targets = _target1()
    report = benchmark(process, targets, repeats=2, seed=0, budget=157, seed_count=5)
    assert report.random.success_rate == 1.0
    assert all(math.isfinite(v) for v in report.random.iterations_to_success)


def test_benchmark_paired_and_deterministic() -> None:
    process, targets = _target1()
    a = benchmark(process, targets, repeats=2, seed=7, budget=8)
    b = benchmark(process, targets, repeats=2, seed=7, budget=8)
    assert a == b


def test_benchmark_rejects_bad_repeats() -> None:
    process, targets = _target1()
    with pytest.raises(ValueError):
        benchmark(process, targets, repeats=0)


def test_benchmark_random_budget_capped_by_grid() -> None:
    process, targets = _target1()
    with pytest.raises(ValueError):
        bench.random_baseline_campaign(process, targets, 200, np.random.default_rng(0))
