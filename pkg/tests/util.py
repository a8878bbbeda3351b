"""Helpers shared across test modules."""
from __future__ import annotations

import numpy as np

from expopt.campaign import (
    STATUS_AWAITING_COMPARISONS,
    CampaignConfig,
    CampaignState,
    GpConfig,
    init_campaign,
    submit_comparison,
)
from expopt.gp import KernelConfig
from expopt.preference import OUTCOME_CURRENT_BETTER, OUTCOME_PRIOR_BETTER
from expopt.scoring import Measurement, Targets
from expopt.space import DesignPoint, DiscreteDim, ParameterSpace


def small_space() -> ParameterSpace:
    """3 x 3 x 2 grid, enough structure for protocol tests."""
    return ParameterSpace(
        dims=(
            DiscreteDim("a", (0.0, 1.0, 2.0)),
            DiscreteDim("b", (10.0, 20.0, 30.0)),
            DiscreteDim("c", (5.0, 6.0)),
        )
    )


def small_config(seed_count: int = 3, budget: int = 4, rng_seed: int = 0) -> CampaignConfig:
    return CampaignConfig(
        space=small_space(),
        targets=Targets(target_length=70.0, target_diameter=1.0),
        gp=GpConfig(kernel=KernelConfig(lengthscale=0.25)),
        iteration_budget=budget,
        seed_count=seed_count,
        rng_seed=rng_seed,
    )


def seeds_for(config: CampaignConfig) -> list[tuple[DesignPoint, Measurement]]:
    """Deterministic off-target seed observations on the config's grid."""
    grid = list(config.space.grid_points())
    picks = grid[:: max(1, len(grid) // config.seed_count)][: config.seed_count]
    return [
        (point, Measurement(median_length=100.0 + 5.0 * i, median_diameter=2.0 + 0.1 * i))
        for i, point in enumerate(picks)
    ]


def answer_comparisons(state: CampaignState, outcome_rule=None) -> CampaignState:
    """Resolve every pending comparison with a deterministic rule."""
    while state.status == STATUS_AWAITING_COMPARISONS:
        current, prior = state.pending[0]
        if outcome_rule is None:
            outcome = OUTCOME_CURRENT_BETTER if (current + prior) % 2 == 0 else OUTCOME_PRIOR_BETTER
        else:
            outcome = outcome_rule(current, prior)
        state = submit_comparison(state, prior, outcome)
    return state


def fresh_campaign(seed_count: int = 3, budget: int = 4, rng_seed: int = 0) -> CampaignState:
    config = small_config(seed_count=seed_count, budget=budget, rng_seed=rng_seed)
    return init_campaign(config, seeds_for(config))


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
