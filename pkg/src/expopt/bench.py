"""Closed-loop simulated campaigns and the optimizer-vs-random benchmark."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .campaign import (
    STATUS_AWAITING_COMPARISONS,
    STATUS_CONVERGED,
    STATUS_READY,
    CampaignConfig,
    CampaignState,
    GpConfig,
    export_trace,
    init_campaign,
    next_recommendation,
    submit_comparison,
    submit_result,
)
from .gp import KernelConfig
from .scoring import Measurement, Targets, target_met
from .simulator import SyntheticProcess, oracle_compare, random_baseline_campaign, simulate_experiment
from .trace import TraceTable

# distinct sub-streams per repeat: campaign scheduling vs simulated process
_SIM_STREAM = 1


@dataclass(frozen=True)
class CampaignSummary:
    converged: bool
    iterations: int
    total_observations: int
    iterations_to_bfv: int
    best_found: float
    final_l_pct: float
    final_d_pct: float

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "total_observations": self.total_observations,
            "iterations_to_bfv": self.iterations_to_bfv,
            "best_found": self.best_found,
            "final_l_pct": self.final_l_pct,
            "final_d_pct": self.final_d_pct,
        }


@dataclass(frozen=True)
class MethodReport:
    name: str
    success_rate: float
    median_iterations: float
    iterations_to_success: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "success_rate": self.success_rate,
            "median_iterations": self.median_iterations,
            "iterations_to_success": list(self.iterations_to_success),
        }


@dataclass(frozen=True)
class BenchmarkReport:
    repeats: int
    optimizer: MethodReport
    random: MethodReport

    def to_dict(self) -> dict:
        return {
            "repeats": self.repeats,
            "methods": [self.optimizer.to_dict(), self.random.to_dict()],
        }


def _answer_pending(state: CampaignState, process: SyntheticProcess, rng: np.random.Generator) -> CampaignState:
    """Resolve every pending comparison through the simulated judge, in order."""
    while state.status == STATUS_AWAITING_COMPARISONS:
        current, prior = state.pending[0]
        outcome = oracle_compare(
            process,
            state.observations[current].point,
            state.observations[prior].point,
            rng,
        )
        state = submit_comparison(state, prior, outcome)
    return state


def make_config(
    process: SyntheticProcess,
    targets: Targets,
    budget: int = 20,
    seed: int = 0,
    mode: str = "exhaustive",
    seed_count: int = 5,
) -> CampaignConfig:
    return CampaignConfig(
        space=process.space,
        targets=targets,
        gp=GpConfig(kernel=KernelConfig(lengthscale=0.25)),
        acquisition_mode=mode,
        iteration_budget=budget,
        seed_count=seed_count,
        rng_seed=seed,
    )


def seed_design(space, count: int, rng: np.random.Generator) -> list:
    """Random space-filling initial design over a discrete grid.

    Latin-hypercube style: each dimension's levels are cycled in shuffled
    order across the seed slots, so every level of every dimension appears
    at least once whenever count allows. Redraws on the (rare) row collision.
    """
    from .space import DesignPoint

    while True:
        columns = []
        for dim in space.dims:
            n_levels = len(dim.levels)
            repeats = -(-count // n_levels)
            pool = (list(range(n_levels)) * repeats)[:count]
            rng.shuffle(pool)
            columns.append([dim.levels[i] for i in pool])
        rows = list(zip(*columns))
        if len(set(rows)) == count:
            return [DesignPoint(row) for row in rows]


def run_simulated_campaign(
    process: SyntheticProcess,
    targets: Targets,
    budget: int = 20,
    seed: int = 0,
    mode: str = "exhaustive",
    seed_count: int = 5,
) -> tuple[CampaignState, CampaignSummary]:
    """Drive a full campaign against the simulator until it stops.

    Seed settings come from a random space-filling design over the grid; all
    comparisons are answered by the quality oracle.
    """
    sim_rng = np.random.default_rng([seed, _SIM_STREAM])
    seeds = []
    for point in seed_design(process.space, seed_count, sim_rng):
        seeds.append((point, simulate_experiment(process, point, sim_rng)))

    config = make_config(process, targets, budget, seed, mode, seed_count)
    state = init_campaign(config, seeds)
    state = _answer_pending(state, process, sim_rng)
    while state.status == STATUS_READY:
        state, rec = next_recommendation(state)
        measurement = simulate_experiment(process, rec.point, sim_rng)
        state = submit_result(state, rec.point, measurement)
        state = _answer_pending(state, process, sim_rng)

    trace = export_trace(state)
    bfv_column = trace.column("BFV")
    final_bfv = bfv_column[-1]
    iterations_to_bfv = next(
        i + 1 for i, value in enumerate(bfv_column) if value == final_bfv
    )
    summary = CampaignSummary(
        converged=state.status == STATUS_CONVERGED,
        iterations=state.iterations_done,
        total_observations=len(state.observations),
        iterations_to_bfv=iterations_to_bfv,
        best_found=float(final_bfv),
        final_l_pct=float(trace.column("L_pct")[-1]),
        final_d_pct=float(trace.column("D_pct")[-1]),
    )
    return state, summary


def _first_success_row(trace: TraceTable, targets: Targets, tolerance: float) -> float:
    """1-based index of the first in-tolerance measurement, inf when none."""
    lengths = trace.column("L")
    diameters = trace.column("D")
    for i, (length, diameter) in enumerate(zip(lengths, diameters), start=1):
        meas = Measurement(median_length=float(length), median_diameter=float(diameter))
        if target_met(meas, targets, tolerance):
            return float(i)
    return math.inf


def benchmark(
    process: SyntheticProcess,
    targets: Targets,
    repeats: int = 20,
    seed: int = 0,
    budget: int = 20,
    mode: str = "exhaustive",
    seed_count: int = 5,
    tolerance: float = 0.2,
) -> BenchmarkReport:
    """Optimizer vs uniform random search under paired seeds and equal budgets.

    Success means some executed experiment measured within tolerance of both
    targets; iterations-to-success counts executed experiments including the
    seed batch, so both methods are scored on the same scale.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    opt_iterations: list[float] = []
    rand_iterations: list[float] = []
    total_budget = seed_count + budget
    for r in range(repeats):
        run_seed = seed + r
        state, _ = run_simulated_campaign(
            process, targets, budget=budget, seed=run_seed, mode=mode, seed_count=seed_count
        )
        opt_iterations.append(_first_success_row(export_trace(state), targets, tolerance))

        rand_rng = np.random.default_rng([run_seed, _SIM_STREAM])
        rand_trace = random_baseline_campaign(process, targets, total_budget, rand_rng)
        rand_iterations.append(_first_success_row(rand_trace, targets, tolerance))

    def report(name: str, iterations: list[float]) -> MethodReport:
        successes = [v for v in iterations if math.isfinite(v)]
        return MethodReport(
            name=name,
            success_rate=len(successes) / len(iterations),
            median_iterations=float(statistics.median(iterations)),
            iterations_to_success=tuple(iterations),
        )

    return BenchmarkReport(
        repeats=repeats,
        optimizer=report("optimizer", opt_iterations),
        random=report("random", rand_iterations),
    )
