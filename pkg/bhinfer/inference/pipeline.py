"""End-to-end estimation of the lifetime law from a dataset."""

from __future__ import annotations

import logging as log
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum

from bhinfer.dataset import CountMode, Dataset
from bhinfer.errors import BHError, DomainError, PipelineError
from bhinfer.inference.estimators import (
    K_MAX,
    REGIME_THRESHOLD,
    ParamEstimate,
    RegimeDecision,
    detect_regime,
    infer_gaussian,
    infer_oscillating,
)
from bhinfer.inference.fluctuations import (
    FluctuationSeries,
    LambdaEstimate,
    delta_steps,
    estimate_lambda,
    residual_variance_curve,
)
from bhinfer.inference.growth import MIN_WINDOW_COUNT, AlphaEstimate, estimate_alpha, pick_delta
from bhinfer.sigma.grid import DeltaConvention, SigmaGrid
from bhinfer.spectral import Regime

__all__ = ["Outcome", "PipelineConfig", "PipelineResult", "run_pipeline"]


class Outcome(str, Enum):
    ESTIMATED = "estimated"
    GRID_REQUIRED = "grid_required"
    PROPORTIONAL_GAUSSIAN = "proportional_gaussian"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PipelineConfig:
    window: tuple[int, int] | None = None
    min_count: float = MIN_WINDOW_COUNT
    regime_threshold: float = REGIME_THRESHOLD
    normalized: bool = True
    k_max: float = K_MAX

    def __post_init__(self) -> None:
        if self.min_count <= 0:
            raise DomainError(f"min_count must be > 0, got {self.min_count}")
        if not 0 < self.regime_threshold < 1:
            raise DomainError(f"regime_threshold must be in (0, 1), got {self.regime_threshold}")


@dataclass
class PipelineResult:
    alpha: AlphaEstimate
    delta1: float
    series1: FluctuationSeries
    lam: LambdaEstimate
    decision: RegimeDecision
    outcome: Outcome
    delta2: float | None = None
    series2: FluctuationSeries | None = None
    estimate: ParamEstimate | None = None
    warnings: list[str] = field(default_factory=list)


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except BHError as e:
        raise PipelineError(name, e) from e


def run_pipeline(
    ds: Dataset, grid: SigmaGrid | None = None, config: PipelineConfig | None = None
) -> PipelineResult:
    """Growth rate, half-doubling residual variance, regime, then the matching estimator.

    The Gaussian branch needs absolute counts and a grid; without them the result
    carries the limitation as its ``outcome`` and no estimate.

    Raises
    ------
    PipelineError
        Tagged with the failing stage: ``alpha``, ``delta``, ``fluctuations``,
        ``lambda``, ``regime``, ``gaussian`` or ``oscillating``.
    """
    config = config or PipelineConfig()
    warnings: list[str] = []

    with _stage("alpha"):
        alpha = estimate_alpha(ds, config.window, config.min_count)
    a_hat = alpha.alpha_hat
    with _stage("delta"):
        delta1 = pick_delta(ds, a_hat, DeltaConvention.HALF)
    with _stage("fluctuations"):
        series1 = residual_variance_curve(ds, a_hat, delta1, normalized=False)
    with _stage("lambda"):
        first, last = alpha.window
        lam = estimate_lambda(series1, (first, last - delta_steps(ds.grid_step, delta1)))
    with _stage("regime"):
        decision = detect_regime(a_hat, lam.lambda_hat, config.regime_threshold)
    log.info(f"alpha={a_hat:.6g}, lambda={lam.lambda_hat:.6g}, regime={decision.regime}")

    result = PipelineResult(
        alpha, delta1, series1, lam, decision, Outcome.ESTIMATED, warnings=warnings
    )
    if decision.regime == Regime.OSCILLATING:
        with _stage("oscillating"):
            result.estimate = infer_oscillating(a_hat, lam.lambda_hat, config.k_max, decision)
        if result.estimate.diagnostics["boundary"]:
            warnings.append("estimate lies at the critical shape")
        return result

    if ds.count_mode == CountMode.PROPORTIONAL:
        warnings.append("cannot estimate in the Gaussian regime from proportional counts")
        result.outcome = Outcome.PROPORTIONAL_GAUSSIAN
        return result
    if grid is None:
        warnings.append("Gaussian regime estimation requires a sigma grid")
        result.outcome = Outcome.GRID_REQUIRED
        return result

    with _stage("gaussian"):
        result.delta2 = pick_delta(ds, a_hat, grid.delta_convention)
        result.series2 = residual_variance_curve(ds, a_hat, result.delta2, config.normalized)
        result.estimate = infer_gaussian(
            ds, grid, a_hat, result.delta2, alpha.window, config.normalized, decision
        )
    if not config.normalized:
        warnings.append("Gaussian target uses unnormalized residuals")
    return result
