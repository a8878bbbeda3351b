"""Synthetic stand-in for the physical fiber process.

Length and diameter respond multiplicatively to per-parameter quadratic
factors around a planted optimum; latent quality is a Gaussian bump. A noisy
comparison oracle plays the human judge. Includes a random-search baseline
and the quadratic-fit sensitivity analysis used on campaign traces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .preference import OUTCOME_CURRENT_BETTER, OUTCOME_PRIOR_BETTER, OUTCOME_TIE
from .scoring import (
    Measurement,
    Targets,
    combined_utility,
    diameter_score,
    length_score,
)
from .space import DesignPoint, DiscreteDim, ParameterSpace
from .trace import TraceTable


def default_space() -> ParameterSpace:
    """The 162-setting grid: 3 positions x 2 angles x 3 widths x 3 flows x 3 speeds."""
    return ParameterSpace(
        dims=(
            DiscreteDim("position", (0.0, 15.0, 30.0), "mm"),
            DiscreteDim("angle", (10.0, 25.0), "deg"),
            DiscreteDim("width", (3.0, 6.0, 9.0), "mm"),
            DiscreteDim("flow", (80.0, 110.0, 140.0), "ml/h"),
            DiscreteDim("speed", (43.0, 68.0, 93.0), "cm/s"),
        )
    )


@dataclass(frozen=True)
class QuadraticResponse:
    """base * prod_i (1 + curvature_i * (z_i - center_i)^2) over normalized z."""

    base: float
    centers: tuple[float, ...]
    curvatures: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.base <= 0:
            raise ValueError("response base must be positive")
        if len(self.centers) != len(self.curvatures):
            raise ValueError("centers and curvatures must have equal length")
        for c, a in zip(self.centers, self.curvatures):
            worst = max(c * c, (1.0 - c) * (1.0 - c))
            if 1.0 + a * worst <= 0:
                raise ValueError("response factor is not positive over the unit box")

    def __call__(self, z: np.ndarray) -> float:
        value = self.base
        for zi, c, a in zip(z, self.centers, self.curvatures):
            value *= 1.0 + a * (zi - c) ** 2
        return value

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "centers": list(self.centers),
            "curvatures": list(self.curvatures),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuadraticResponse":
        return cls(
            base=float(data["base"]),
            centers=tuple(float(v) for v in data["centers"]),
            curvatures=tuple(float(v) for v in data["curvatures"]),
        )


@dataclass(frozen=True)
class FitReport:
    """Quadratic-fit strength of one response against one parameter."""

    parameter: str
    response: str
    r: float
    coefficients: tuple[float, float, float]  # ascending powers


@dataclass(frozen=True)
class SyntheticProcess:
    """Deterministic responses plus measurement and judgement noise models."""

    space: ParameterSpace
    length: QuadraticResponse
    diameter: QuadraticResponse
    quality_centers: tuple[float, ...]
    quality_curvatures: tuple[float, ...]
    noise_rel_length: float = 0.0
    noise_rel_diameter: float = 0.0
    compare_noise: float = 0.0
    tie_threshold: float = 0.05
    rng_seed: int = 0

    def __post_init__(self) -> None:
        ndim = self.space.ndim
        for name in ("quality_centers", "quality_curvatures"):
            if len(getattr(self, name)) != ndim:
                raise ValueError(f"{name} must have {ndim} entries")
        if any(q < 0 for q in self.quality_curvatures):
            raise ValueError("quality curvatures must be nonnegative")
        if self.tie_threshold < 0:
            raise ValueError("tie_threshold must be nonnegative")
        for resp in (self.length, self.diameter):
            if len(resp.centers) != ndim:
                raise ValueError("response dimensionality does not match the space")

    def length_response(self, z: np.ndarray) -> float:
        return self.length(z)

    def diameter_response(self, z: np.ndarray) -> float:
        return self.diameter(z)

    def quality_response(self, z: np.ndarray) -> float:
        exponent = sum(
            q * (zi - c) ** 2
            for zi, c, q in zip(z, self.quality_centers, self.quality_curvatures)
        )
        return math.exp(-exponent)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "length": self.length.to_dict(),
            "diameter": self.diameter.to_dict(),
            "quality": {
                "centers": list(self.quality_centers),
                "curvatures": list(self.quality_curvatures),
            },
            "noise_rel_length": self.noise_rel_length,
            "noise_rel_diameter": self.noise_rel_diameter,
            "compare_noise": self.compare_noise,
            "tie_threshold": self.tie_threshold,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticProcess":
        return cls(
            space=ParameterSpace.from_dict(data["space"]),
            length=QuadraticResponse.from_dict(data["length"]),
            diameter=QuadraticResponse.from_dict(data["diameter"]),
            quality_centers=tuple(float(v) for v in data["quality"]["centers"]),
            quality_curvatures=tuple(float(v) for v in data["quality"]["curvatures"]),
            noise_rel_length=float(data["noise_rel_length"]),
            noise_rel_diameter=float(data["noise_rel_diameter"]),
            compare_noise=float(data["compare_noise"]),
            tie_threshold=float(data["tie_threshold"]),
            rng_seed=int(data["rng_seed"]),
        )


# Planted optimum: position 15 mm, angle 10 deg, width 6 mm, flow 110 ml/h,
# speed 68 cm/s. In normalized coordinates:
_OPTIMUM = (0.5, 0.0, 0.5, 0.5, 0.5)

# Curvatures are chosen so each parameter individually breaks at least one
# 20% tolerance when moved off-optimum, making the optimum the lone feasible
# grid point, and so speed then width carry the largest combined curvature.
_LENGTH_CURVATURES = (0.10, 0.25, 0.45, 0.85, 0.90)
_DIAMETER_CURVATURES = (0.85, 0.30, 0.90, 0.10, 0.70)
_QUALITY_CURVATURES = (0.4, 1.2, 0.8, 0.6, 1.2)


def _target1_process() -> SyntheticProcess:
    return SyntheticProcess(
        space=default_space(),
        length=QuadraticResponse(base=70.0, centers=_OPTIMUM, curvatures=_LENGTH_CURVATURES),
        diameter=QuadraticResponse(base=1.0, centers=_OPTIMUM, curvatures=_DIAMETER_CURVATURES),
        quality_centers=_OPTIMUM,
        quality_curvatures=_QUALITY_CURVATURES,
        noise_rel_length=0.01,
        noise_rel_diameter=0.01,
        compare_noise=0.02,
        tie_threshold=0.05,
    )


def _target3_process() -> SyntheticProcess:
    # Best reachable diameter is 0.8 um, twice the 0.4 um target, so the
    # diameter objective can never come within tolerance.
    return SyntheticProcess(
        space=default_space(),
        length=QuadraticResponse(base=70.0, centers=_OPTIMUM, curvatures=_LENGTH_CURVATURES),
        diameter=QuadraticResponse(base=0.8, centers=_OPTIMUM, curvatures=_DIAMETER_CURVATURES),
        quality_centers=_OPTIMUM,
        quality_curvatures=_QUALITY_CURVATURES,
        noise_rel_length=0.0,
        noise_rel_diameter=0.0,
        compare_noise=0.0,
        tie_threshold=0.05,
    )


BUILTIN_PROCESSES = {
    "target1_achievable": _target1_process,
    "target3_unachievable": _target3_process,
}

BUILTIN_TARGETS = {
    "target1_achievable": Targets(target_length=70.0, target_diameter=1.0),
    "target3_unachievable": Targets(target_length=70.0, target_diameter=0.4),
}


def load_process(name_or_path: str) -> SyntheticProcess:
    """Resolve a built-in process name or read a process definition JSON file."""
    if name_or_path in BUILTIN_PROCESSES:
        return BUILTIN_PROCESSES[name_or_path]()
    with open(name_or_path, "r", encoding="utf-8") as fh:
        return SyntheticProcess.from_dict(json.load(fh))


def simulate_experiment(
    process: SyntheticProcess, point: DesignPoint, rng: np.random.Generator
) -> Measurement:
    """Run one synthetic experiment: responses plus relative Gaussian noise."""
    process.space.validate(point)
    z = process.space.normalize(point)
    eps_l = rng.normal(0.0, 1.0) * process.noise_rel_length
    eps_d = rng.normal(0.0, 1.0) * process.noise_rel_diameter
    length = process.length_response(z) * (1.0 + eps_l)
    diameter = process.diameter_response(z) * (1.0 + eps_d)
    return Measurement(median_length=max(length, 0.0), median_diameter=max(diameter, 0.0))


def oracle_compare(
    process: SyntheticProcess,
    current: DesignPoint,
    prior: DesignPoint,
    rng: np.random.Generator,
) -> str:
    """Judge two products by latent quality: the noisy gap decides, small gaps tie."""
    process.space.validate(current)
    process.space.validate(prior)
    gap = process.quality_response(process.space.normalize(current)) - process.quality_response(
        process.space.normalize(prior)
    )
    gap += rng.normal(0.0, 1.0) * process.compare_noise
    if abs(gap) < process.tie_threshold:
        return OUTCOME_TIE
    return OUTCOME_CURRENT_BETTER if gap > 0 else OUTCOME_PRIOR_BETTER


def polynomial_fit_R(
    samples: Sequence[tuple[float, float]],
    parameter: str = "",
    response: str = "",
) -> FitReport:
    """Least-squares quadratic fit of response against one parameter.

    R is the square root of the coefficient of determination, clamped to
    [0,1]; a constant response has zero explained variance, so R = 0. The
    abscissa is standardized internally, making R invariant under affine
    rescaling of the parameter axis; coefficients are reported in the
    original axis.
    """
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    x = np.array([s[0] for s in samples], dtype=float)
    y = np.array([s[1] for s in samples], dtype=float)
    if np.unique(x).size < 3:
        raise ValueError("need at least 3 distinct parameter values")

    # standardized abscissa keeps the normal equations well conditioned
    mu = float(np.mean(x))
    half_span = float(np.max(x) - np.min(x)) / 2.0
    u = (x - mu) / half_span
    design = np.column_stack([np.ones_like(u), u, u * u])
    coef_u, *_ = np.linalg.lstsq(design, y, rcond=None)

    fitted = design @ coef_u
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        r = 0.0
    else:
        r_sq = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
        r = math.sqrt(r_sq)

    # map b0 + b1 u + b2 u^2 back through u = (x - mu)/h
    b0, b1, b2 = (float(v) for v in coef_u)
    h = half_span
    c2 = b2 / (h * h)
    c1 = b1 / h - 2.0 * b2 * mu / (h * h)
    c0 = b0 - b1 * mu / h + b2 * mu * mu / (h * h)
    return FitReport(parameter=parameter, response=response, r=r, coefficients=(c0, c1, c2))


def random_baseline_campaign(
    process: SyntheticProcess,
    targets: Targets,
    iterations: int,
    rng: np.random.Generator,
    weights: tuple[float, float, float] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
) -> TraceTable:
    """Uniform sampling without replacement, scored with the same pipeline.

    Quality enters directly from the latent quality response rather than
    learned comparisons, giving the baseline the benefit of the doubt.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    grid = list(process.space.grid_points())
    if iterations > len(grid):
        raise ValueError(f"iterations exceed the {len(grid)}-point grid")
    chosen = rng.choice(len(grid), size=iterations, replace=False)

    dim_names = [d.name for d in process.space.dims]
    columns = ["iteration"] + dim_names + [
        "L", "D", "f_L", "f_D", "f_Q", "y", "BFV", "L_pct", "D_pct",
    ]
    rows: list[tuple] = []
    best = float("inf")
    for i, grid_idx in enumerate(chosen, start=1):
        point = grid[int(grid_idx)]
        meas = simulate_experiment(process, point, rng)
        f_l = length_score(meas, targets)
        f_d = diameter_score(meas, targets)
        f_q = process.quality_response(process.space.normalize(point))
        y = combined_utility(f_l, f_d, f_q, weights)
        best = min(best, y)
        l_pct = 100.0 * abs(meas.median_length - targets.target_length) / targets.target_length
        d_pct = 100.0 * abs(meas.median_diameter - targets.target_diameter) / targets.target_diameter
        rows.append(
            tuple(
                [i]
                + [float(c) for c in point.coords]
                + [meas.median_length, meas.median_diameter, f_l, f_d, f_q, y, best, l_pct, d_pct]
            )
        )
    return TraceTable(columns=tuple(columns), rows=tuple(rows))
