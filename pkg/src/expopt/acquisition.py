"""Expected-improvement acquisition and its maximization over a design space.

The GP models the combined utility y, which is minimized; EI is therefore
applied in maximization orientation to the negated posterior. Maximization
runs exhaustively over all-discrete grids or via DIRECT on the unit box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtr

from .direct import direct_maximize
from .gp import GPModel, predict
from .space import DesignPoint, ParameterSpace

_SQRT_2PI = math.sqrt(2.0 * math.pi)

DEFAULT_DIRECT_BUDGET = 1000
# duplicate-avoidance pool when the DIRECT winner is an already-observed setting
RERANK_CANDIDATES = 10


@dataclass(frozen=True)
class AcquisitionResult:
    """Recommended setting with its acquisition value and search cost."""

    point: DesignPoint
    acquisition_value: float
    evaluations_used: int
    duplicate: bool = False


def expected_improvement(mean: float, stddev: float, best_value: float) -> float:
    """Closed-form EI for a Gaussian belief, maximization convention.

    (mean - best) * Phi(Z) + stddev * phi(Z) with Z = (mean - best) / stddev;
    exactly 0 when stddev is 0.
    """
    if not (math.isfinite(mean) and math.isfinite(stddev) and math.isfinite(best_value)):
        raise ValueError("mean, stddev and best_value must be finite")
    if stddev < 0:
        raise ValueError(f"stddev must be nonnegative, got {stddev}")
    if stddev == 0.0:
        return 0.0
    z = (mean - best_value) / stddev
    phi = math.exp(-0.5 * z * z) / _SQRT_2PI
    ei = (mean - best_value) * float(ndtr(z)) + stddev * phi
    return max(ei, 0.0)


def negated_utility_ei(model: GPModel, z_query, best_utility: float) -> float:
    """EI of the negated-utility posterior at a normalized query point."""
    post = predict(model, z_query)
    return expected_improvement(-post.mean, math.sqrt(post.variance), -best_utility)


def exhaustive_argmax(
    objective: Callable[[DesignPoint], float],
    space: ParameterSpace,
) -> tuple[DesignPoint, float]:
    """Evaluate the objective at every grid point and return the maximizer.

    Ties break toward the lexicographically-lowest level indices. Only defined
    for all-discrete spaces with at most 10^6 grid points.
    """
    if not space.all_discrete:
        raise ValueError("exhaustive search requires an all-discrete space")
    best_point: Optional[DesignPoint] = None
    best_value = -math.inf
    for point in space.grid_points():
        value = float(objective(point))
        if best_point is None or value > best_value:
            best_point, best_value = point, value
    assert best_point is not None
    return best_point, best_value


def _is_observed(model: GPModel, z: np.ndarray) -> bool:
    return bool(np.any(np.all(np.abs(model.inputs - z[None, :]) <= 1e-12, axis=1)))


def recommend_next(
    model: GPModel,
    space: ParameterSpace,
    best_utility: float,
    mode: str = "exhaustive",
    direct_budget: int = DEFAULT_DIRECT_BUDGET,
) -> AcquisitionResult:
    """Maximize EI of the negated-utility posterior over the space.

    mode "exhaustive" scans the full discrete grid; mode "direct" runs DIRECT
    on the unit box and snaps discrete coordinates to the nearest level. A
    snapped DIRECT winner that duplicates a training input is replaced by the
    best non-duplicate among the top candidates; if every candidate
    duplicates, the winner is returned with the duplicate flag set.
    """
    if mode == "exhaustive":
        point, value = exhaustive_argmax(
            lambda p: negated_utility_ei(model, space.normalize(p), best_utility), space
        )
        return AcquisitionResult(
            point=point,
            acquisition_value=value,
            evaluations_used=space.grid_size(),
            duplicate=_is_observed(model, space.normalize(point)),
        )

    if mode != "direct":
        raise ValueError(f"unknown acquisition mode {mode!r}")

    result = direct_maximize(
        lambda z: negated_utility_ei(model, z, best_utility), space.ndim, direct_budget
    )
    ranked = sorted(enumerate(result.samples), key=lambda t: (-t[1][1], t[0]))
    candidates: list[tuple[DesignPoint, float]] = []
    seen: set[tuple[float, ...]] = set()
    for _, (z, _value) in ranked:
        snapped = space.denormalize(z)
        if snapped.coords in seen:
            continue
        seen.add(snapped.coords)
        candidates.append((snapped, negated_utility_ei(model, space.normalize(snapped), best_utility)))
        if len(candidates) >= RERANK_CANDIDATES:
            break
    # EI at the snapped settings decides; original DIRECT rank breaks ties
    candidates.sort(key=lambda item: -item[1])

    chosen, chosen_value = candidates[0]
    duplicate = True
    for cand, value in candidates:
        if not _is_observed(model, space.normalize(cand)):
            chosen, chosen_value = cand, value
            duplicate = False
            break
    return AcquisitionResult(
        point=chosen,
        acquisition_value=chosen_value,
        evaluations_used=result.evaluations,
        duplicate=duplicate,
    )
