"""Target scores, the combined utility, best-found tracking, and the stop test.

Length and diameter each score 0 at their target and grow linearly with the
deviation, capped at the configured maximum; the combined utility blends both
with (1 - quality) so that 0 means every objective is met. The utility is
minimized; progress is the running minimum (best found value).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

DEFAULT_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
DEFAULT_STOP_TOLERANCE = 0.2
MAX_MULTIPLE = 3.0


@dataclass(frozen=True)
class Targets:
    """Desired median length/diameter with score caps (default 3x the target)."""

    target_length: float
    target_diameter: float
    max_length: Optional[float] = None
    max_diameter: Optional[float] = None

    def __post_init__(self) -> None:
        if self.max_length is None:
            object.__setattr__(self, "max_length", MAX_MULTIPLE * self.target_length)
        if self.max_diameter is None:
            object.__setattr__(self, "max_diameter", MAX_MULTIPLE * self.target_diameter)
        if not (0 < self.target_length < self.max_length):
            raise ValueError("need 0 < target_length < max_length")
        if not (0 < self.target_diameter < self.max_diameter):
            raise ValueError("need 0 < target_diameter < max_diameter")

    def to_dict(self) -> dict:
        return {
            "target_length": self.target_length,
            "target_diameter": self.target_diameter,
            "max_length": self.max_length,
            "max_diameter": self.max_diameter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Targets":
        return cls(
            target_length=float(data["target_length"]),
            target_diameter=float(data["target_diameter"]),
            max_length=float(data["max_length"]) if data.get("max_length") is not None else None,
            max_diameter=float(data["max_diameter"]) if data.get("max_diameter") is not None else None,
        )


@dataclass(frozen=True)
class Measurement:
    """Median fiber length and diameter in micrometers."""

    median_length: float
    median_diameter: float

    def __post_init__(self) -> None:
        for name in ("median_length", "median_diameter"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")

    def to_dict(self) -> dict:
        return {"median_length": self.median_length, "median_diameter": self.median_diameter}

    @classmethod
    def from_dict(cls, data: dict) -> "Measurement":
        return cls(
            median_length=float(data["median_length"]),
            median_diameter=float(data["median_diameter"]),
        )


@dataclass(frozen=True)
class TraceEntry:
    """Scored state of one observation under the latest recomputation.

    best_found is the running minimum of utility up to this entry; utility
    itself may sit above it.
    """

    iteration: int
    utility: float
    best_found: float
    f_l: float
    f_d: float
    f_q: float

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "utility": self.utility,
            "best_found": self.best_found,
            "f_l": self.f_l,
            "f_d": self.f_d,
            "f_q": self.f_q,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TraceEntry":
        return cls(
            iteration=int(data["iteration"]),
            utility=float(data["utility"]),
            best_found=float(data["best_found"]),
            f_l=float(data["f_l"]),
            f_d=float(data["f_d"]),
            f_q=float(data["f_q"]),
        )


def length_score(measurement: Measurement, targets: Targets) -> float:
    """|min(L_max, L) - L_target| / (L_max - L_target)."""
    capped = min(targets.max_length, measurement.median_length)
    return abs(capped - targets.target_length) / (targets.max_length - targets.target_length)


def diameter_score(measurement: Measurement, targets: Targets) -> float:
    """|min(D_max, D) - D_target| / (D_max - D_target)."""
    capped = min(targets.max_diameter, measurement.median_diameter)
    return abs(capped - targets.target_diameter) / (targets.max_diameter - targets.target_diameter)


def combined_utility(
    f_l: float, f_d: float, f_q: float, weights: Sequence[float] = DEFAULT_WEIGHTS
) -> float:
    """w_L*f_L + w_D*f_D + w_Q*(1 - f_Q); 0 exactly when every objective is met."""
    for name, value in (("f_l", f_l), ("f_d", f_d), ("f_q", f_q)):
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {value}")
    w_l, w_d, w_q = weights
    if w_l < 0 or w_d < 0 or w_q < 0:
        raise ValueError("weights must be nonnegative")
    if abs((w_l + w_d + w_q) - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    return w_l * f_l + w_d * f_d + w_q * (1.0 - f_q)


def best_found_values(utilities: Sequence[float]) -> list[float]:
    """Elementwise running minimum."""
    if len(utilities) == 0:
        raise ValueError("utilities must be nonempty")
    best: list[float] = []
    current = float("inf")
    for u in utilities:
        current = min(current, float(u))
        best.append(current)
    return best


def target_met(
    measurement: Measurement, targets: Targets, tolerance: float = DEFAULT_STOP_TOLERANCE
) -> bool:
    """True when both relative deviations from target are within tolerance."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    dev_l = abs(measurement.median_length - targets.target_length) / targets.target_length
    dev_d = abs(measurement.median_diameter - targets.target_diameter) / targets.target_diameter
    return dev_l <= tolerance and dev_d <= tolerance
