"""Campaign state machine for human-in-the-loop experiment optimization.

The loop: score everything seen so far, fit the surrogate, recommend the next
setting, wait for the measured result, collect pairwise quality comparisons,
then test for convergence or budget exhaustion. Utilities of ALL past
observations are recomputed whenever the comparison set changes, because the
learned quality scores shift as judgements accumulate; the trace always
reflects the latest recomputation and an audit log keeps the history.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .acquisition import DEFAULT_DIRECT_BUDGET, recommend_next
from .gp import KernelConfig, fit, select_lengthscale
from .preference import (
    OUTCOMES,
    PrefConfig,
    PreferenceSet,
    quality_scores,
    record_outcome,
    schedule_comparisons,
)
from .scoring import (
    DEFAULT_STOP_TOLERANCE,
    DEFAULT_WEIGHTS,
    Measurement,
    Targets,
    TraceEntry,
    combined_utility,
    diameter_score,
    length_score,
    target_met,
)
from .space import DesignPoint, ParameterSpace
from .trace import TraceTable

STATUS_AWAITING_SEED = "awaiting_seed"
STATUS_READY = "ready"
STATUS_AWAITING_RESULT = "awaiting_result"
STATUS_AWAITING_COMPARISONS = "awaiting_comparisons"
STATUS_CONVERGED = "converged"
STATUS_BUDGET_EXHAUSTED = "budget_exhausted"

TERMINAL_STATUSES = (STATUS_CONVERGED, STATUS_BUDGET_EXHAUSTED)

SEED_TAG = "seed"

DEFAULT_OBS_NOISE = 1e-4
DEFAULT_ITERATION_BUDGET = 20
DEFAULT_SEED_COUNT = 5


class ProtocolError(Exception):
    """Raised when an operation is attempted in the wrong campaign phase."""


@dataclass(frozen=True)
class GpConfig:
    """Surrogate settings: kernel, observation noise, and fitting options.

    select_lengthscale picks the lengthscale from a fixed grid by marginal
    likelihood at every refit. center_prior sets the prior mean to the mean of
    the current utilities instead of zero, so unexplored regions are not
    presumed better than everything seen. scale_signal multiplies the kernel's
    signal variance by the empirical variance of the current utilities, so
    posterior uncertainty is calibrated to the observed spread instead of the
    unit prior.
    """

    kernel: KernelConfig = field(default_factory=KernelConfig)
    obs_noise_variance: float = DEFAULT_OBS_NOISE
    select_lengthscale: bool = False
    center_prior: bool = True
    scale_signal: bool = True

    def __post_init__(self) -> None:
        if self.obs_noise_variance < 0:
            raise ValueError("obs_noise_variance must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "kernel": {
                "lengthscale": self.kernel.lengthscale,
                "signal_variance": self.kernel.signal_variance,
            },
            "obs_noise_variance": self.obs_noise_variance,
            "select_lengthscale": self.select_lengthscale,
            "center_prior": self.center_prior,
            "scale_signal": self.scale_signal,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GpConfig":
        return cls(
            kernel=KernelConfig(
                lengthscale=float(data["kernel"]["lengthscale"]),
                signal_variance=float(data["kernel"]["signal_variance"]),
            ),
            obs_noise_variance=float(data["obs_noise_variance"]),
            select_lengthscale=bool(data["select_lengthscale"]),
            center_prior=bool(data["center_prior"]),
            scale_signal=bool(data["scale_signal"]),
        )


@dataclass(frozen=True)
class CampaignConfig:
    space: ParameterSpace
    targets: Targets
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS
    gp: GpConfig = field(default_factory=GpConfig)
    pref: PrefConfig = field(default_factory=PrefConfig)
    acquisition_mode: str = "exhaustive"
    direct_budget: int = DEFAULT_DIRECT_BUDGET
    iteration_budget: int = DEFAULT_ITERATION_BUDGET
    seed_count: int = DEFAULT_SEED_COUNT
    stop_tolerance: float = DEFAULT_STOP_TOLERANCE
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.iteration_budget < 1:
            raise ValueError("iteration_budget must be at least 1")
        if self.seed_count < 1:
            raise ValueError("seed_count must be at least 1")
        if self.acquisition_mode not in ("exhaustive", "direct"):
            raise ValueError(f"unknown acquisition mode {self.acquisition_mode!r}")
        if self.acquisition_mode == "exhaustive" and not self.space.all_discrete:
            raise ValueError("exhaustive acquisition needs an all-discrete space")
        if len(self.weights) != 3:
            raise ValueError("weights must have three components")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "targets": self.targets.to_dict(),
            "weights": list(self.weights),
            "gp": self.gp.to_dict(),
            "pref": self.pref.to_dict(),
            "acquisition_mode": self.acquisition_mode,
            "direct_budget": self.direct_budget,
            "iteration_budget": self.iteration_budget,
            "seed_count": self.seed_count,
            "stop_tolerance": self.stop_tolerance,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        return cls(
            space=ParameterSpace.from_dict(data["space"]),
            targets=Targets.from_dict(data["targets"]),
            weights=tuple(float(w) for w in data["weights"]),
            gp=GpConfig.from_dict(data["gp"]),
            pref=PrefConfig.from_dict(data["pref"]),
            acquisition_mode=str(data["acquisition_mode"]),
            direct_budget=int(data["direct_budget"]),
            iteration_budget=int(data["iteration_budget"]),
            seed_count=int(data["seed_count"]),
            stop_tolerance=float(data["stop_tolerance"]),
            rng_seed=int(data["rng_seed"]),
        )


@dataclass(frozen=True)
class Observation:
    """One executed experiment: where, what was measured, and which batch."""

    point: DesignPoint
    measurement: Measurement
    image_refs: tuple[str, ...] = ()
    batch: str = SEED_TAG  # "seed" or "iteration <k>"

    def to_dict(self) -> dict:
        return {
            "point": list(self.point.coords),
            "measurement": self.measurement.to_dict(),
            "image_refs": list(self.image_refs),
            "batch": self.batch,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Observation":
        return cls(
            point=DesignPoint(data["point"]),
            measurement=Measurement.from_dict(data["measurement"]),
            image_refs=tuple(data["image_refs"]),
            batch=str(data["batch"]),
        )


@dataclass(frozen=True)
class Recommendation:
    """Next setting to run, tagged with the observation index it will become."""

    point: DesignPoint
    acquisition_value: float
    iteration: int
    duplicate_flag: bool = False

    def to_dict(self) -> dict:
        return {
            "point": list(self.point.coords),
            "acquisition_value": self.acquisition_value,
            "iteration": self.iteration,
            "duplicate_flag": self.duplicate_flag,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Recommendation":
        return cls(
            point=DesignPoint(data["point"]),
            acquisition_value=float(data["acquisition_value"]),
            iteration=int(data["iteration"]),
            duplicate_flag=bool(data["duplicate_flag"]),
        )


@dataclass
class CampaignState:
    config: CampaignConfig
    observations: list[Observation] = field(default_factory=list)
    preferences: PreferenceSet = field(default_factory=PreferenceSet)
    trace: list[TraceEntry] = field(default_factory=list)
    audit: list[dict] = field(default_factory=list)
    pending: list[tuple[int, int]] = field(default_factory=list)  # (current, prior)
    status: str = STATUS_AWAITING_SEED
    recommendation: Optional[Recommendation] = None
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    @property
    def iterations_done(self) -> int:
        """Completed post-seed iterations."""
        return max(0, len(self.observations) - self.config.seed_count)

    @property
    def best_found(self) -> Optional[float]:
        if not self.trace:
            return None
        return self.trace[-1].best_found

    def pending_prior_indices(self) -> list[int]:
        return [prior for _, prior in self.pending]

    def clone(self) -> "CampaignState":
        fresh_rng = np.random.default_rng()
        fresh_rng.bit_generator.state = copy.deepcopy(self.rng.bit_generator.state)
        return CampaignState(
            config=self.config,
            observations=list(self.observations),
            preferences=PreferenceSet(pairs=list(self.preferences.pairs)),
            trace=list(self.trace),
            audit=copy.deepcopy(self.audit),
            pending=list(self.pending),
            status=self.status,
            recommendation=self.recommendation,
            rng=fresh_rng,
        )

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "observations": [o.to_dict() for o in self.observations],
            "preferences": self.preferences.to_dict(),
            "trace": [e.to_dict() for e in self.trace],
            "audit": copy.deepcopy(self.audit),
            "pending": [list(p) for p in self.pending],
            "status": self.status,
            "recommendation": self.recommendation.to_dict() if self.recommendation else None,
            "rng_state": copy.deepcopy(self.rng.bit_generator.state),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignState":
        rng = np.random.default_rng()
        rng.bit_generator.state = copy.deepcopy(data["rng_state"])
        return cls(
            config=CampaignConfig.from_dict(data["config"]),
            observations=[Observation.from_dict(o) for o in data["observations"]],
            preferences=PreferenceSet.from_dict(data["preferences"]),
            trace=[TraceEntry.from_dict(e) for e in data["trace"]],
            audit=copy.deepcopy(data["audit"]),
            pending=[(int(c), int(p)) for c, p in data["pending"]],
            status=str(data["status"]),
            recommendation=(
                Recommendation.from_dict(data["recommendation"])
                if data["recommendation"] is not None
                else None
            ),
            rng=rng,
        )


def _recompute_scores(state: CampaignState, context: str) -> None:
    """Refresh f_Q, utilities, and the running-minimum column for all rows."""
    if not state.observations:
        state.trace = []
        return
    cfg = state.config
    points = np.array([cfg.space.normalize(o.point) for o in state.observations])
    scores = quality_scores(points, state.preferences, cfg.pref)
    entries: list[TraceEntry] = []
    best = float("inf")
    for idx, obs in enumerate(state.observations):
        f_l = length_score(obs.measurement, cfg.targets)
        f_d = diameter_score(obs.measurement, cfg.targets)
        f_q = scores.normalized[idx]
        utility = combined_utility(f_l, f_d, f_q, cfg.weights)
        best = min(best, utility)
        entries.append(
            TraceEntry(
                iteration=idx + 1,
                utility=utility,
                best_found=best,
                f_l=f_l,
                f_d=f_d,
                f_q=f_q,
            )
        )
    state.trace = entries
    state.audit.append(
        {
            "context": context,
            "observations": len(state.observations),
            "comparisons": len(state.preferences),
            "utilities": [e.utility for e in entries],
            "f_q": [e.f_q for e in entries],
        }
    )


def _schedule_for(state: CampaignState, t: int) -> None:
    """Queue comparison requests for the t-th (1-based) observation."""
    priors = schedule_comparisons(t, t - 1, state.rng)
    state.pending.extend((t - 1, prior) for prior in priors)


def init_campaign(
    config: CampaignConfig,
    seed_observations: Sequence[tuple[DesignPoint, Measurement]],
) -> CampaignState:
    """Record the seed batch and queue its comparisons.

    Each seed after the first is compared against earlier seeds under the same
    logarithmic schedule used in the main loop.
    """
    if len(seed_observations) != config.seed_count:
        raise ValueError(
            f"expected {config.seed_count} seed observations, got {len(seed_observations)}"
        )
    state = CampaignState(config=config, rng=np.random.default_rng(config.rng_seed))
    for j, (point, measurement) in enumerate(seed_observations, start=1):
        config.space.validate(point)
        state.observations.append(
            Observation(point=point, measurement=measurement, batch=SEED_TAG)
        )
        _schedule_for(state, j)
    _recompute_scores(state, context="init")
    state.status = STATUS_AWAITING_COMPARISONS if state.pending else STATUS_READY
    return state


def next_recommendation(state: CampaignState) -> tuple[CampaignState, Recommendation]:
    """Refit the surrogate on recomputed utilities and pick the next setting.

    Calling again while a recommendation is outstanding returns the stored one
    unchanged, so a lost response can be retried safely.
    """
    if state.status == STATUS_AWAITING_RESULT:
        assert state.recommendation is not None
        return state, state.recommendation
    if state.status in TERMINAL_STATUSES:
        raise ProtocolError(f"campaign is {state.status}")
    if state.status == STATUS_AWAITING_COMPARISONS or state.pending:
        raise ProtocolError("comparison outcomes are still pending")
    if state.status != STATUS_READY:
        raise ProtocolError(f"cannot recommend while {state.status}")

    new = state.clone()
    _recompute_scores(new, context="recommendation")
    cfg = new.config
    inputs = np.array([cfg.space.normalize(o.point) for o in new.observations])
    targets_vec = np.array([e.utility for e in new.trace])
    prior_mean = float(np.mean(targets_vec)) if cfg.gp.center_prior else 0.0
    signal_variance = cfg.gp.kernel.signal_variance
    if cfg.gp.scale_signal:
        signal_variance *= max(float(np.var(targets_vec)), 1e-6)
    if cfg.gp.select_lengthscale:
        model = select_lengthscale(
            inputs,
            targets_vec,
            cfg.gp.obs_noise_variance,
            signal_variance=signal_variance,
            prior_mean=prior_mean,
        )
    else:
        model = fit(
            inputs,
            targets_vec,
            KernelConfig(cfg.gp.kernel.lengthscale, signal_variance),
            obs_noise_variance=cfg.gp.obs_noise_variance,
            prior_mean=prior_mean,
        )
    best_utility = new.trace[-1].best_found
    result = recommend_next(
        model,
        cfg.space,
        best_utility,
        mode=cfg.acquisition_mode,
        direct_budget=cfg.direct_budget,
    )
    recommendation = Recommendation(
        point=result.point,
        acquisition_value=result.acquisition_value,
        iteration=len(new.observations) + 1,
        duplicate_flag=result.duplicate,
    )
    new.recommendation = recommendation
    new.status = STATUS_AWAITING_RESULT
    return new, recommendation


def submit_result(
    state: CampaignState,
    point: DesignPoint,
    measurement: Measurement,
    image_refs: Sequence[str] = (),
) -> CampaignState:
    """Record the measured outcome of the recommended setting."""
    if state.status != STATUS_AWAITING_RESULT or state.recommendation is None:
        raise ProtocolError("no recommendation is awaiting a result")
    if tuple(point.coords) != tuple(state.recommendation.point.coords):
        raise ProtocolError(
            "result point does not match the outstanding recommendation"
        )
    new = state.clone()
    k = len(new.observations) + 1 - new.config.seed_count
    new.observations.append(
        Observation(
            point=point,
            measurement=measurement,
            image_refs=tuple(image_refs),
            batch=f"iteration {k}",
        )
    )
    new.recommendation = None
    t = len(new.observations)
    _schedule_for(new, t)
    _recompute_scores(new, context="result")
    if new.pending:
        new.status = STATUS_AWAITING_COMPARISONS
    else:
        _finish_iteration(new)
    return new


def submit_comparison(state: CampaignState, prior_index: int, outcome: str) -> CampaignState:
    """Record one pairwise judgement against a pending prior observation.

    When the last pending judgement lands, the stop test runs: target met on
    the newest measurement ends the campaign, an exhausted budget ends it
    unconverged, anything else returns to ready.
    """
    if state.status != STATUS_AWAITING_COMPARISONS:
        raise ProtocolError("no comparisons are pending")
    if outcome not in OUTCOMES:
        raise ValueError(f"unknown outcome {outcome!r}")
    match = next(
        (i for i, (_, prior) in enumerate(state.pending) if prior == prior_index), None
    )
    if match is None:
        raise ProtocolError(f"prior index {prior_index} is not pending")
    new = state.clone()
    current, prior = new.pending.pop(match)
    new.preferences = record_outcome(new.preferences, current, prior, outcome)
    _recompute_scores(new, context="comparison")
    if not new.pending:
        _finish_iteration(new)
    return new


def _finish_iteration(state: CampaignState) -> None:
    """Stop test: convergence on the newest measurement, then budget."""
    cfg = state.config
    newest = state.observations[-1].measurement
    if target_met(newest, cfg.targets, cfg.stop_tolerance):
        state.status = STATUS_CONVERGED
    elif state.iterations_done >= cfg.iteration_budget:
        state.status = STATUS_BUDGET_EXHAUSTED
    else:
        state.status = STATUS_READY


def export_trace(state: CampaignState) -> TraceTable:
    """One row per scored observation with native-unit parameters and scores."""
    cfg = state.config
    dim_names = [d.name for d in cfg.space.dims]
    columns = (
        ["iteration"]
        + dim_names
        + ["L", "D", "f_L", "f_D", "f_Q", "y", "BFV", "L_pct", "D_pct"]
    )
    rows: list[list] = []
    for obs, entry in zip(state.observations, state.trace):
        meas = obs.measurement
        l_pct = 100.0 * abs(meas.median_length - cfg.targets.target_length) / cfg.targets.target_length
        d_pct = 100.0 * abs(meas.median_diameter - cfg.targets.target_diameter) / cfg.targets.target_diameter
        rows.append(
            [entry.iteration]
            + [float(c) for c in obs.point.coords]
            + [
                meas.median_length,
                meas.median_diameter,
                entry.f_l,
                entry.f_d,
                entry.f_q,
                entry.utility,
                entry.best_found,
                l_pct,
                d_pct,
            ]
        )
    return TraceTable(columns=tuple(columns), rows=tuple(tuple(r) for r in rows))
