"""Human-in-the-loop Bayesian experiment optimization toolkit."""

from .acquisition import AcquisitionResult, expected_improvement, exhaustive_argmax, recommend_next
from .campaign import (
    CampaignConfig,
    CampaignState,
    GpConfig,
    Observation,
    ProtocolError,
    Recommendation,
    export_trace,
    init_campaign,
    next_recommendation,
    submit_comparison,
    submit_result,
)
from .direct import DirectResult, ObjectiveEvaluationError, direct_maximize
from .gp import (
    GPModel,
    KernelConfig,
    NotPositiveDefiniteError,
    Posterior,
    fit,
    log_marginal_likelihood,
    predict,
    se_kernel,
    select_lengthscale,
)
from .preference import (
    PrefConfig,
    PreferencePair,
    PreferenceSet,
    QualityScores,
    fit_latent_map,
    normalize_scores,
    quality_scores,
    record_outcome,
    schedule_comparisons,
)
from .scoring import (
    Measurement,
    Targets,
    TraceEntry,
    best_found_values,
    combined_utility,
    diameter_score,
    length_score,
    target_met,
)
from .simulator import (
    FitReport,
    SyntheticProcess,
    load_process,
    oracle_compare,
    polynomial_fit_R,
    random_baseline_campaign,
    simulate_experiment,
)
from .space import ContinuousDim, DesignPoint, DiscreteDim, ParameterSpace
from .store import CampaignStore, StoreCorruptError
from .trace import TraceTable

__version__ = "0.1.0"

__all__ = [
    "AcquisitionResult",
    "CampaignConfig",
    "CampaignState",
    "CampaignStore",
    "ContinuousDim",
    "DesignPoint",
    "DirectResult",
    "DiscreteDim",
    "FitReport",
    "GPModel",
    "GpConfig",
    "KernelConfig",
    "Measurement",
    "NotPositiveDefiniteError",
    "ObjectiveEvaluationError",
    "Observation",
    "ParameterSpace",
    "Posterior",
    "PrefConfig",
    "PreferencePair",
    "PreferenceSet",
    "ProtocolError",
    "QualityScores",
    "Recommendation",
    "StoreCorruptError",
    "SyntheticProcess",
    "Targets",
    "TraceEntry",
    "TraceTable",
    "best_found_values",
    "combined_utility",
    "diameter_score",
    "direct_maximize",
    "exhaustive_argmax",
    "expected_improvement",
    "export_trace",
    "fit",
    "fit_latent_map",
    "init_campaign",
    "length_score",
    "load_process",
    "log_marginal_likelihood",
    "next_recommendation",
    "normalize_scores",
    "oracle_compare",
    "polynomial_fit_R",
    "predict",
    "quality_scores",
    "random_baseline_campaign",
    "recommend_next",
    "record_outcome",
    "schedule_comparisons",
    "se_kernel",
    "select_lengthscale",
    "simulate_experiment",
    "submit_comparison",
    "submit_result",
    "target_met",
]
