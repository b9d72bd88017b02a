"""Regime decision and the two estimators of ``(k, theta)``."""

from __future__ import annotations

import logging as log
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from bhinfer.dataset import CountMode, Dataset
from bhinfer.errors import (
    DomainError,
    ExtrapolationError,
    ProportionalCountsError,
    RegimeMismatchError,
)
from bhinfer.inference.fluctuations import delta_steps, residual_variance_curve
from bhinfer.sigma.grid import SigmaGrid, lookup
from bhinfer.spectral import LOG2, Regime, critical_shape

__all__ = [
    "ParamEstimate",
    "RegimeDecision",
    "detect_regime",
    "eigen_ratio",
    "infer_gaussian",
    "infer_oscillating",
]

REGIME_THRESHOLD = 0.10
K_MAX = 1e4
BOUNDARY_WINDOW = 1e-6
SWEEP_SUBDIVISIONS = 4


@dataclass(frozen=True)
class RegimeDecision:
    lambda_hat: float
    ratio: float
    threshold: float
    regime: Regime


@dataclass
class ParamEstimate:
    """Lifetime parameters recovered under the growth-rate constraint
    ``(2^{1/k} - 1) / theta = alpha_hat``.
    """

    k_hat: float
    theta_hat: float
    alpha_hat: float
    regime_used: Regime
    diagnostics: dict = field(default_factory=dict)

    @property
    def mu_hat(self) -> float:
        return self.k_hat * self.theta_hat

    @property
    def cv_hat(self) -> float:
        return 1 / math.sqrt(self.k_hat)

    @classmethod
    def from_shape(cls, k: float, alpha_hat: float, regime: Regime, **diagnostics) -> ParamEstimate:
        return cls(k, math.expm1(LOG2 / k) / alpha_hat, alpha_hat, regime, diagnostics)


def detect_regime(
    alpha_hat: float, lambda_hat: float, threshold: float = REGIME_THRESHOLD
) -> RegimeDecision:
    """Gaussian when ``|2 lambda - alpha| / alpha`` is below ``threshold``, else oscillating."""
    if not alpha_hat > 0:
        raise DomainError(f"alpha_hat must be > 0, got {alpha_hat}")
    ratio = abs(2 * lambda_hat - alpha_hat) / alpha_hat
    regime = Regime.GAUSSIAN if ratio < threshold else Regime.OSCILLATING
    return RegimeDecision(lambda_hat, ratio, threshold, regime)


def _require(decision: RegimeDecision | None, regime: Regime) -> None:
    if decision is not None and decision.regime != regime:
        raise RegimeMismatchError(f"Detected regime is {decision.regime}, estimator needs {regime}")


def _sweep(grid: SigmaGrid) -> np.ndarray:
    """Grid nodes with ``SWEEP_SUBDIVISIONS - 1`` evenly spaced points between neighbours."""
    k = grid.k_values
    fractions = np.arange(SWEEP_SUBDIVISIONS) / SWEEP_SUBDIVISIONS
    inner = (k[:-1, None] + fractions * np.diff(k)[:, None]).ravel()
    return np.append(inner, k[-1])


def infer_gaussian(
    ds: Dataset,
    grid: SigmaGrid,
    alpha_hat: float,
    delta2: float,
    window: tuple[int, int] | None = None,
    normalized: bool = True,
    decision: RegimeDecision | None = None,
) -> ParamEstimate:
    """Match the tabulated limiting variance to the observed residual variance.

    Parameters
    ----------
    ds : Dataset
        Absolute counts.
    grid : SigmaGrid
        Limiting variance table.
    alpha_hat : float
        Estimated growth rate.
    delta2 : float
        Residual step, a grid multiple close to the grid's delta convention.
    window : tuple[int, int], optional
        Inclusive grid-index range of the times ``T`` averaged into the target;
        ``T + delta2`` must also lie in it. Defaults to every usable time.
    normalized : bool, optional
        Divide residuals by ``sqrt(N_T)``. The unnormalized variant is kept for
        comparison only.
    decision : RegimeDecision, optional
        Checked to be Gaussian when given.

    Returns
    -------
    ParamEstimate
        ``k_hat`` minimises ``|lookup(k) - target|`` over a sweep finer than the grid mesh.
    """
    _require(decision, Regime.GAUSSIAN)
    if ds.count_mode == CountMode.PROPORTIONAL:
        raise ProportionalCountsError(
            "Cannot estimate in the Gaussian regime from proportional counts"
        )
    series = residual_variance_curve(ds, alpha_hat, delta2, normalized=normalized)
    selected = np.ones(len(series), dtype=bool)
    if window is not None:
        steps = delta_steps(ds.grid_step, delta2)
        selected = (series.indices >= window[0]) & (series.indices + steps <= window[1])
    if not selected.any():
        raise ExtrapolationError(f"No residual time inside window {window}")
    target = float(series.variances[selected].mean())

    lo, hi = float(grid.sigma2.min()), float(grid.sigma2.max())
    if not lo <= target <= hi:
        raise ExtrapolationError(
            f"Target variance {target:.6g} outside the grid value range [{lo:.6g}, {hi:.6g}]"
        )
    ks = _sweep(grid)
    distance = np.abs(lookup(grid, ks) - target)
    best = int(np.argmin(distance))
    if not normalized:
        log.warning("Gaussian target computed from unnormalized residuals")
    return ParamEstimate.from_shape(
        float(ks[best]),
        alpha_hat,
        Regime.GAUSSIAN,
        target=target,
        argmin_residual=float(distance[best]),
        n_times=int(selected.sum()),
        delta=delta2,
        normalized=normalized,
    )


def eigen_ratio(k):
    """``lambda / alpha`` as a function of the shape alone."""
    k = np.asarray(k, dtype=float)
    growth = np.expm1(LOG2 / k)
    value = (growth * np.cos(2 * np.pi / k) - 2 * np.sin(np.pi / k) ** 2) / growth
    return float(value) if value.ndim == 0 else value


def infer_oscillating(
    alpha_hat: float,
    lambda_hat: float,
    k_max: float = K_MAX,
    decision: RegimeDecision | None = None,
) -> ParamEstimate:
    """Solve ``eigen_ratio(k) = lambda_hat / alpha_hat`` on ``[k_c, k_max]``.

    Only the ratio enters, so the estimate does not depend on the count scale.
    """
    _require(decision, Regime.OSCILLATING)
    if not alpha_hat > 0:
        raise DomainError(f"alpha_hat must be > 0, got {alpha_hat}")
    k_c = critical_shape()
    ratio = lambda_hat / alpha_hat
    lo, hi = eigen_ratio(k_c), eigen_ratio(k_max)
    if not lo <= ratio <= hi:
        raise ExtrapolationError(
            f"lambda/alpha = {ratio:.6g} outside the oscillating range [{lo:.6g}, {hi:.6g}]"
        )

    try:
        k_hat = optimize.brentq(lambda k: eigen_ratio(k) - ratio, k_c, k_max, xtol=1e-10)
    except ValueError:
        ks = np.geomspace(k_c, k_max, 100_000)
        k_hat = float(ks[np.argmin(np.abs(eigen_ratio(ks) - ratio))])
        log.warning(f"Root bracketing failed, using the sweep minimum k={k_hat:g}")

    boundary = abs(k_hat - k_c) <= BOUNDARY_WINDOW
    if boundary:
        log.warning(f"Estimate k={k_hat:.8g} lies at the critical shape, it is not reliable")
    return ParamEstimate.from_shape(
        float(k_hat),
        alpha_hat,
        Regime.OSCILLATING,
        lambda_hat=lambda_hat,
        ratio=ratio,
        boundary=boundary,
    )
