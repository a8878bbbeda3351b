"""Latent quality from pairwise comparisons.

Observed products are compared pairwise by a human (better / worse / hard to
tell). The latent per-observation quality is the MAP estimate under a GP prior
over the design points and a probit likelihood on the comparison outcomes,
then normalized into [0,1] for use in the combined utility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import log_ndtr

from .gp import KernelConfig, NotPositiveDefiniteError, kernel_matrix

OUTCOME_CURRENT_BETTER = "current_better"
OUTCOME_PRIOR_BETTER = "prior_better"
OUTCOME_TIE = "difficult_to_tell"
OUTCOMES = (OUTCOME_CURRENT_BETTER, OUTCOME_PRIOR_BETTER, OUTCOME_TIE)

PREF_JITTER = 1e-6


@dataclass(frozen=True)
class PreferencePair:
    """One directed judgement: observation `winner` beat observation `loser`."""

    winner: int
    loser: int

    def __post_init__(self) -> None:
        if self.winner == self.loser:
            raise ValueError("a comparison needs two distinct observations")
        if self.winner < 0 or self.loser < 0:
            raise ValueError("observation indices must be nonnegative")


@dataclass
class PreferenceSet:
    """Multiset of directed pairs; ties contribute both directions."""

    pairs: list[PreferencePair] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.pairs = list(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def max_index(self) -> int:
        """Largest observation index referenced, or -1 when empty."""
        if not self.pairs:
            return -1
        return max(max(p.winner, p.loser) for p in self.pairs)

    def to_dict(self) -> dict:
        return {"pairs": [[p.winner, p.loser] for p in self.pairs]}

    @classmethod
    def from_dict(cls, data: dict) -> "PreferenceSet":
        return cls(pairs=[PreferencePair(int(w), int(l)) for w, l in data["pairs"]])


@dataclass(frozen=True)
class PrefConfig:
    """Comparison-noise scale and the latent prior's kernel plus Newton limits."""

    noise_sigma: float = 0.1
    kernel: KernelConfig = field(default_factory=lambda: KernelConfig(lengthscale=0.2))
    newton_tol: float = 1e-10
    newton_max_iter: int = 100

    def __post_init__(self) -> None:
        if not (self.noise_sigma > 0):
            raise ValueError(f"noise_sigma must be positive, got {self.noise_sigma}")
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be at least 1")

    def to_dict(self) -> dict:
        return {
            "noise_sigma": self.noise_sigma,
            "kernel": {
                "lengthscale": self.kernel.lengthscale,
                "signal_variance": self.kernel.signal_variance,
            },
            "newton_tol": self.newton_tol,
            "newton_max_iter": self.newton_max_iter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PrefConfig":
        return cls(
            noise_sigma=float(data["noise_sigma"]),
            kernel=KernelConfig(
                lengthscale=float(data["kernel"]["lengthscale"]),
                signal_variance=float(data["kernel"]["signal_variance"]),
            ),
            newton_tol=float(data["newton_tol"]),
            newton_max_iter=int(data["newton_max_iter"]),
        )


@dataclass(frozen=True)
class QualityScores:
    """Latent quality values and their [0,1] normalization, one per observation."""

    latent: tuple[float, ...]
    normalized: tuple[float, ...]


@dataclass(frozen=True)
class MapResult:
    latent: np.ndarray
    converged: bool
    iterations: int


def schedule_comparisons(t: int, count_prior: int, rng: np.random.Generator) -> list[int]:
    """Pick which prior observations the t-th observation is compared against.

    The count grows logarithmically: floor(log2(t-1)) + 1, capped by the number
    of priors, drawn uniformly without replacement. The first observation has
    nothing to compare against.
    """
    if t < 1:
        raise ValueError(f"iteration index must be at least 1, got {t}")
    if count_prior < 0:
        raise ValueError("count_prior must be nonnegative")
    if t == 1 or count_prior == 0:
        return []
    count = min((t - 1).bit_length(), count_prior)
    chosen = rng.choice(count_prior, size=count, replace=False)
    return [int(i) for i in chosen]


def record_outcome(
    omega: PreferenceSet, current: int, prior: int, outcome: str
) -> PreferenceSet:
    """Append the directed pair(s) an outcome implies; ties append both."""
    if current == prior:
        raise ValueError("cannot compare an observation with itself")
    if outcome == OUTCOME_CURRENT_BETTER:
        new = [PreferencePair(current, prior)]
    elif outcome == OUTCOME_PRIOR_BETTER:
        new = [PreferencePair(prior, current)]
    elif outcome == OUTCOME_TIE:
        new = [PreferencePair(current, prior), PreferencePair(prior, current)]
    else:
        raise ValueError(f"unknown outcome {outcome!r}")
    return PreferenceSet(pairs=omega.pairs + new)


def _neg_log_likelihood_terms(
    f: np.ndarray, winners: np.ndarray, losers: np.ndarray, noise_sigma: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient, and Hessian diagonal pieces of -sum ln Phi(z_m).

    z_m = (f[winner] - f[loser]) / (sqrt(2) * sigma). Gradient and Hessian are
    assembled from per-pair contributions; returns (value, grad, z).
    """
    denom = math.sqrt(2.0) * noise_sigma
    z = (f[winners] - f[losers]) / denom
    log_phi = log_ndtr(z)
    value = -float(np.sum(log_phi))
    # r = pdf/cdf computed in log space; stable far into the left tail
    r = np.exp(-0.5 * z * z - 0.5 * math.log(2.0 * math.pi) - log_phi)
    grad = np.zeros_like(f)
    np.add.at(grad, winners, -r / denom)
    np.add.at(grad, losers, r / denom)
    return value, grad, z


def _nll_hessian(
    z: np.ndarray,
    winners: np.ndarray,
    losers: np.ndarray,
    noise_sigma: float,
    n: int,
) -> np.ndarray:
    """Hessian of -sum ln Phi(z_m); positive semidefinite by log-concavity."""
    log_phi = log_ndtr(z)
    r = np.exp(-0.5 * z * z - 0.5 * math.log(2.0 * math.pi) - log_phi)
    w = r * (r + z) / (2.0 * noise_sigma * noise_sigma)
    hess = np.zeros((n, n))
    np.add.at(hess, (winners, winners), w)
    np.add.at(hess, (losers, losers), w)
    np.add.at(hess, (winners, losers), -w)
    np.add.at(hess, (losers, winners), -w)
    return hess


def fit_latent_map(
    points: np.ndarray, omega: PreferenceSet, config: PrefConfig
) -> MapResult:
    """MAP latent quality under a GP prior and probit comparison likelihood.

    Minimizes S(f) = -sum_m ln Phi(z_m) + f' Sigma^{-1} f / 2 by damped
    Newton-Raphson from f = 0, halving the step while S increases. At the
    minimum f = Sigma * grad_loglik(f), the stationarity condition used as the
    convergence oracle in tests.

    The latent quality is a function of the design point, so observations at
    coincident coordinates share one latent value: the fit runs over unique
    points and comparisons between two runs of the same setting carry no
    information (their likelihood term is constant).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a nonempty 2-d array")
    n_obs = points.shape[0]
    if omega.max_index() >= n_obs:
        raise ValueError("preference set references an unknown observation")

    key_to_unique: dict[tuple[float, ...], int] = {}
    obs_to_unique: list[int] = []
    unique_rows: list[np.ndarray] = []
    for row in points:
        key = tuple(float(v) for v in row)
        if key not in key_to_unique:
            key_to_unique[key] = len(unique_rows)
            unique_rows.append(row)
        obs_to_unique.append(key_to_unique[key])
    unique_points = np.array(unique_rows)
    n = unique_points.shape[0]
    expand = np.array(obs_to_unique, dtype=int)

    sigma = kernel_matrix(unique_points, unique_points, config.kernel)
    sigma[np.diag_indices_from(sigma)] += PREF_JITTER
    try:
        sigma_factor = cho_factor(sigma, lower=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - jitter prevents this
        raise NotPositiveDefiniteError("latent prior covariance is not positive definite") from exc

    pairs = [
        (obs_to_unique[p.winner], obs_to_unique[p.loser])
        for p in omega.pairs
        if obs_to_unique[p.winner] != obs_to_unique[p.loser]
    ]
    if not pairs:
        return MapResult(latent=np.zeros(n_obs), converged=True, iterations=0)

    winners = np.array([w for w, _ in pairs], dtype=int)
    losers = np.array([l for _, l in pairs], dtype=int)

    def objective(f: np.ndarray) -> float:
        value, _, _ = _neg_log_likelihood_terms(f, winners, losers, config.noise_sigma)
        return value + 0.5 * float(f @ cho_solve(sigma_factor, f))

    f = np.zeros(n)
    s_current = objective(f)
    converged = False
    iterations = 0
    for iterations in range(1, config.newton_max_iter + 1):
        _, grad_nll, z = _neg_log_likelihood_terms(f, winners, losers, config.noise_sigma)
        hess_nll = _nll_hessian(z, winners, losers, config.noise_sigma, n)
        # Newton step solves (Sigma^-1 + H) d = -(Sigma^-1 f + grad_nll);
        # multiplying through by Sigma gives (I + Sigma H) d = -(f + Sigma g)
        # and avoids forming Sigma^-1
        lhs = np.eye(n) + sigma @ hess_nll
        rhs = -(f + sigma @ grad_nll)
        try:
            step = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("Newton system is singular") from exc

        scale = 1.0
        decreased = False
        for _ in range(60):
            candidate = f + scale * step
            s_candidate = objective(candidate)
            if s_candidate <= s_current:
                decreased = True
                break
            scale *= 0.5
        if not decreased:
            # numerically stationary: no descent along the Newton direction
            converged = True
            break
        f = f + scale * step
        s_current = s_candidate
        if float(np.max(np.abs(scale * step))) < config.newton_tol:
            converged = True
            break
    return MapResult(latent=f[expand], converged=converged, iterations=iterations)


def normalize_scores(latent: Sequence[float]) -> np.ndarray:
    """Map latent scores into [0,1] without over-stretching small spreads.

    shift = min(0, lowest latent); scale = max(highest latent - shift, 1).
    """
    arr = np.asarray(latent, dtype=float)
    if arr.size == 0:
        raise ValueError("latent vector must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("latent vector must be finite")
    shift = min(0.0, float(arr.min()))
    scale = max(float(arr.max()) - shift, 1.0)
    return (arr - shift) / scale


def quality_scores(
    points: np.ndarray, omega: PreferenceSet, config: PrefConfig
) -> QualityScores:
    """Latent MAP plus normalization; neutral 0.5 for all when no comparisons."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if len(omega) == 0:
        return QualityScores(latent=(0.0,) * n, normalized=(0.5,) * n)
    result = fit_latent_map(points, omega, config)
    normalized = normalize_scores(result.latent)
    return QualityScores(
        latent=tuple(float(v) for v in result.latent),
        normalized=tuple(float(v) for v in normalized),
    )
