"""Residuals ``N_{t+delta} - e^{alpha delta} N_t`` and the growth of their variance."""

from __future__ import annotations

import logging as log
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from bhinfer.dataset import Dataset
from bhinfer.errors import DomainError, InsufficientDataError

__all__ = [
    "FluctuationSeries",
    "LambdaEstimate",
    "delta_steps",
    "estimate_lambda",
    "residual_variance_curve",
    "residuals",
]

STEP_TOL = 1e-9


@dataclass(frozen=True)
class FluctuationSeries:
    """Across-trajectory variance of the residuals at each usable grid time.

    ``indices`` are the grid indices of ``times`` in the source dataset.
    """

    delta: float
    times: np.ndarray
    indices: np.ndarray
    variances: np.ndarray
    n_used: np.ndarray
    normalized: bool = False

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class LambdaEstimate:
    lambda_hat: float
    r2: float
    window: tuple[int, int]
    intercept: float = 0.0


def delta_steps(grid_step: float, delta: float) -> int:
    """Number of grid steps in ``delta``, which must be a positive grid multiple."""
    steps = round(delta / grid_step)
    if steps < 1 or abs(steps * grid_step - delta) > STEP_TOL * max(delta, grid_step):
        raise DomainError(f"delta={delta:g} is not a positive multiple of grid_step={grid_step:g}")
    return steps


def residuals(
    ds: Dataset, alpha_hat: float, delta: float, normalized: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Residual matrix of shape ``(n_data, n_times - steps)`` and its validity mask.

    A residual is valid only when both of its entries are. In normalized mode each
    residual is divided by ``sqrt(N_t)``.
    """
    s = delta_steps(ds.grid_step, delta)
    if s >= ds.n_times:
        raise InsufficientDataError(f"delta={delta:g} spans the whole observation window")
    now, later = ds.counts[:, :-s], ds.counts[:, s:]
    pair = ds.valid[:, :-s] & ds.valid[:, s:]
    resid = later - math.exp(alpha_hat * delta) * now
    if normalized:
        positive = now > 0
        if np.any(pair & ~positive):
            raise InsufficientDataError("Normalized residuals need positive counts")
        with np.errstate(invalid="ignore", divide="ignore"):
            resid = resid / np.sqrt(np.where(positive, now, np.nan))
    return np.where(pair, resid, np.nan), pair


def residual_variance_curve(
    ds: Dataset, alpha_hat: float, delta: float, normalized: bool = False
) -> FluctuationSeries:
    """Empirical variance (``1/n`` estimator) of the residuals at every grid time.

    Times with fewer than two valid residuals are dropped.
    """
    resid, pair = residuals(ds, alpha_hat, delta, normalized)
    n_used = pair.sum(axis=0)
    keep = n_used >= 2
    if not keep.any():
        raise InsufficientDataError("No time point has two valid trajectories")
    if (dropped := int((~keep).sum())) > 0:
        log.warning(f"Dropped {dropped} time points with fewer than two valid trajectories")

    filled = np.where(pair, resid, 0.0)[:, keep]
    n = n_used[keep]
    mean = filled.sum(axis=0) / n
    centred = np.where(pair[:, keep], filled - mean, 0.0)
    variances = (centred**2).sum(axis=0) / n

    indices = np.flatnonzero(keep)
    return FluctuationSeries(
        delta=delta,
        times=ds.times[indices],
        indices=indices,
        variances=variances,
        n_used=n,
        normalized=normalized,
    )


def estimate_lambda(
    series: FluctuationSeries, window: tuple[int, int] | None = None
) -> LambdaEstimate:
    """Slope of ``0.5 * log(variance)`` against time.

    ``window`` is an inclusive range of grid indices; by default the whole series.
    """
    mask = np.ones(len(series), dtype=bool)
    if window is not None:
        mask = (series.indices >= window[0]) & (series.indices <= window[1])
    if mask.sum() < 2:
        raise InsufficientDataError(f"Fewer than two variance points in window {window}")
    variances = series.variances[mask]
    if np.any(variances <= 0):
        raise InsufficientDataError("Non-positive residual variance in the fit window")
    fit = stats.linregress(series.times[mask], 0.5 * np.log(variances))
    used = series.indices[mask]
    return LambdaEstimate(
        float(fit.slope), float(fit.rvalue**2), (int(used[0]), int(used[-1])), float(fit.intercept)
    )
