"""Estimation of the lifetime law from population counts."""

from __future__ import annotations

from bhinfer.inference.estimators import (
    ParamEstimate,
    RegimeDecision,
    detect_regime,
    eigen_ratio,
    infer_gaussian,
    infer_oscillating,
)
from bhinfer.inference.fluctuations import (
    FluctuationSeries,
    LambdaEstimate,
    delta_steps,
    estimate_lambda,
    residual_variance_curve,
    residuals,
)
from bhinfer.inference.growth import AlphaEstimate, default_window, estimate_alpha, pick_delta
from bhinfer.inference.pipeline import Outcome, PipelineConfig, PipelineResult, run_pipeline

__all__ = [
    "AlphaEstimate",
    "FluctuationSeries",
    "LambdaEstimate",
    "Outcome",
    "ParamEstimate",
    "PipelineConfig",
    "PipelineResult",
    "RegimeDecision",
    "default_window",
    "delta_steps",
    "detect_regime",
    "eigen_ratio",
    "estimate_alpha",
    "estimate_lambda",
    "infer_gaussian",
    "infer_oscillating",
    "pick_delta",
    "residual_variance_curve",
    "residuals",
]
