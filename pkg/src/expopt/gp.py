"""Zero-mean Gaussian-process regression with a squared-exponential kernel.

All inputs are expected in normalized [0,1] coordinates. The covariance is
regularized with observation noise plus an escalating jitter, factorized once
per fit, and reused for every prediction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

JITTER_START = 1e-8
JITTER_CAP = 1e-2
JITTER_GROWTH = 10.0

DEFAULT_LENGTHSCALE_GRID = (0.05, 0.1, 0.2, 0.4, 0.8)


class NotPositiveDefiniteError(RuntimeError):
    """Covariance could not be factorized even at the jitter cap."""


@dataclass(frozen=True)
class KernelConfig:
    """Squared-exponential kernel parameters (lengthscale in normalized units)."""

    lengthscale: float = 0.2
    signal_variance: float = 1.0

    def __post_init__(self) -> None:
        if not self.lengthscale > 0:
            raise ValueError(f"lengthscale must be positive, got {self.lengthscale}")
        if not self.signal_variance > 0:
            raise ValueError(f"signal_variance must be positive, got {self.signal_variance}")


@dataclass(frozen=True)
class Posterior:
    """Predictive distribution at a single query point."""

    mean: float
    variance: float


@dataclass(frozen=True)
class GPModel:
    """Fitted GP: training data plus the Cholesky factor of the regularized covariance.

    ``factor`` is lower-triangular with L @ L.T == K + (obs_noise_variance + jitter) I.
    ``prior_mean`` is a constant mean subtracted before conditioning and added
    back to predictions; the default 0.0 gives the plain zero-mean posterior.
    Immutable after fit; safe to share across threads.
    """

    inputs: np.ndarray
    targets: np.ndarray
    kernel: KernelConfig
    obs_noise_variance: float
    jitter: float
    factor: np.ndarray
    alpha: np.ndarray  # solve(K_reg, targets - prior_mean), cached
    prior_mean: float = 0.0

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


def se_kernel(xi, xj, config: KernelConfig) -> float:
    """Squared-exponential covariance between two points.

    k(xi, xj) = signal_variance * exp(-||xi - xj||^2 / (2 * lengthscale^2))
    """
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise ValueError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    sq = float(np.sum((xi - xj) ** 2))
    return config.signal_variance * math.exp(-sq / (2.0 * config.lengthscale**2))


def kernel_matrix(x: np.ndarray, y: np.ndarray, config: KernelConfig) -> np.ndarray:
    """Cross-covariance matrix between two point sets (n x d, m x d)."""
    sq = np.sum(x**2, axis=1)[:, None] + np.sum(y**2, axis=1)[None, :] - 2.0 * x @ y.T
    np.maximum(sq, 0.0, out=sq)
    return config.signal_variance * np.exp(-sq / (2.0 * config.lengthscale**2))


def _cholesky_with_escalation(cov: np.ndarray, obs_noise_variance: float) -> tuple[np.ndarray, float]:
    """Factorize cov + (noise + jitter) I, escalating jitter 1e-8 -> 1e-2 by x10."""
    n = cov.shape[0]
    jitter = 0.0
    while True:
        try:
            factor = np.linalg.cholesky(cov + (obs_noise_variance + jitter) * np.eye(n))
            return factor, jitter
        except np.linalg.LinAlgError:
            if jitter >= JITTER_CAP:
                raise NotPositiveDefiniteError(
                    f"covariance is not positive definite even with jitter {jitter:g}"
                ) from None
            jitter = JITTER_START if jitter == 0.0 else min(jitter * JITTER_GROWTH, JITTER_CAP)


def fit(
    inputs,
    targets,
    kernel: KernelConfig,
    obs_noise_variance: float = 0.0,
    prior_mean: float = 0.0,
) -> GPModel:
    """Assemble and factorize the regularized covariance over the training set.

    Deterministic for identical inputs. Raises NotPositiveDefiniteError if the
    factorization fails after jitter escalation.
    """
    x = np.atleast_2d(np.asarray(inputs, dtype=float))
    y = np.asarray(targets, dtype=float).ravel()
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"{x.shape[0]} inputs vs {y.shape[0]} targets")
    if x.shape[0] < 1:
        raise ValueError("need at least one observation")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs and targets must be finite")
    if obs_noise_variance < 0:
        raise ValueError("obs_noise_variance must be nonnegative")

    cov = kernel_matrix(x, x, kernel)
    factor, jitter = _cholesky_with_escalation(cov, obs_noise_variance)
    alpha = cho_solve((factor, True), y - prior_mean)
    return GPModel(
        inputs=x,
        targets=y,
        kernel=kernel,
        obs_noise_variance=obs_noise_variance,
        jitter=jitter,
        factor=factor,
        alpha=alpha,
        prior_mean=prior_mean,
    )


def predict(model: GPModel, x_star) -> Posterior:
    """Posterior mean and variance at a query point.

    mean = k^T K^-1 y, variance = k(x*,x*) - k^T K^-1 k, both through the
    stored Cholesky factor (K here is the regularized training covariance).
    Variance is clamped at zero against roundoff.
    """
    x_star = np.asarray(x_star, dtype=float).ravel()
    if x_star.shape[0] != model.dim:
        raise ValueError(f"query has dimension {x_star.shape[0]}, model has {model.dim}")
    k_star = kernel_matrix(model.inputs, x_star[None, :], model.kernel).ravel()
    mean = model.prior_mean + float(k_star @ model.alpha)
    v = solve_triangular(model.factor, k_star, lower=True)
    variance = float(model.kernel.signal_variance - v @ v)
    return Posterior(mean=mean, variance=max(variance, 0.0))


def log_marginal_likelihood(model: GPModel) -> float:
    """Log density of the targets under the regularized GP prior.

    -1/2 y^T K^-1 y - 1/2 log det K - n/2 log 2pi, with y centered on the
    model's prior mean.
    """
    resid = model.targets - model.prior_mean
    quad = float(resid @ model.alpha)
    logdet = 2.0 * float(np.sum(np.log(np.diag(model.factor))))
    return -0.5 * quad - 0.5 * logdet - 0.5 * model.n * math.log(2.0 * math.pi)


def select_lengthscale(
    inputs,
    targets,
    obs_noise_variance: float,
    grid=DEFAULT_LENGTHSCALE_GRID,
    signal_variance: float = 1.0,
    prior_mean: float = 0.0,
) -> GPModel:
    """Refit over a fixed lengthscale grid, keeping the best marginal likelihood.

    Ties keep the earliest grid entry, so the choice is deterministic.
    """
    best_model = None
    best_lml = -math.inf
    for ls in grid:
        model = fit(inputs, targets, KernelConfig(ls, signal_variance),
                    obs_noise_variance, prior_mean)
        lml = log_marginal_likelihood(model)
        if lml > best_lml:
            best_model = model
            best_lml = lml
    assert best_model is not None
    return best_model
