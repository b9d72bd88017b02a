"""Exponential growth rate of the mean population, and the step choice that follows from it."""

from __future__ import annotations

import logging as log
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from bhinfer.dataset import Dataset
from bhinfer.errors import DomainError, InsufficientDataError
from bhinfer.sigma.grid import DeltaConvention

__all__ = ["AlphaEstimate", "default_window", "estimate_alpha", "pick_delta"]

MIN_WINDOW_COUNT = 50.0
SCALE_RTOL = 1e-12


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_hat: float
    per_trajectory_slopes: np.ndarray
    mean_r2: float
    window: tuple[int, int]


def default_window(ds: Dataset, min_count: float = MIN_WINDOW_COUNT) -> tuple[int, int]:
    """Grid index window ``(first, last)`` used for the log-linear fits.

    The window opens at the first time the ensemble mean reaches ``min_count``
    individuals, that is ``min_count * count_scale`` in the measured units. Proportional
    data of unknown scale starts at index 0.
    The window closes at the last time every trajectory is still observed.
    """
    if not ds.valid.any(axis=1).all():
        raise InsufficientDataError("Dataset has trajectories without valid entries")
    last_seen = ds.n_times - 1 - np.argmax(ds.valid[:, ::-1], axis=1)
    last = int(last_seen.min())
    first = 0
    if ds.count_scale is not None:
        threshold = min_count * ds.count_scale
        reached = np.flatnonzero(ds.mean_counts() >= threshold * (1 - SCALE_RTOL))
        if not reached.size:
            raise InsufficientDataError(f"Ensemble mean never reaches {threshold:g}")
        first = int(reached[0])
    if last - first < 1:
        raise InsufficientDataError(f"Window [{first}, {last}] holds fewer than two time points")
    return first, last


def _check_window(ds: Dataset, window: tuple[int, int]) -> tuple[int, int]:
    first, last = (int(i) for i in window)
    if not 0 <= first < last < ds.n_times:
        raise InsufficientDataError(f"Invalid window {window} for {ds.n_times} time points")
    return first, last


def estimate_alpha(
    ds: Dataset, window: tuple[int, int] | None = None, min_count: float = MIN_WINDOW_COUNT
) -> AlphaEstimate:
    """Average over trajectories of the OLS slope of log counts against time.

    Each trajectory is fitted on its valid entries inside ``window``; trajectories
    with fewer than two such entries are skipped.
    """
    first, last = _check_window(ds, window) if window else default_window(ds, min_count)
    times = ds.times[first : last + 1]
    counts = ds.counts[:, first : last + 1]
    valid = ds.valid[:, first : last + 1]
    if np.any(counts[valid] <= 0):
        raise InsufficientDataError(f"Non-positive counts in window [{first}, {last}]")

    slopes, r2 = [], []
    for row, mask in zip(counts, valid):
        if mask.sum() < 2:
            continue
        fit = stats.linregress(times[mask], np.log(row[mask]))
        slopes.append(fit.slope)
        r2.append(fit.rvalue**2)
    if not slopes:
        raise InsufficientDataError(f"No trajectory has two valid points in [{first}, {last}]")
    if (skipped := ds.n_data - len(slopes)) > 0:
        log.warning(f"{skipped} trajectories have fewer than two valid points in the window")

    slopes = np.array(slopes)
    return AlphaEstimate(float(slopes.mean()), slopes, float(np.mean(r2)), (first, last))


def pick_delta(
    ds: Dataset | float, alpha_hat: float, target: DeltaConvention | str = DeltaConvention.HALF
) -> float:
    """Grid multiple ``i * grid_step`` (``i >= 1``) closest to ``log2/(2 alpha)`` or ``log2/alpha``.

    Ties go to the smaller multiple.
    """
    if not alpha_hat > 0:
        raise DomainError(f"alpha_hat must be > 0, got {alpha_hat}")
    step = ds.grid_step if isinstance(ds, Dataset) else float(ds)
    goal = DeltaConvention(target).delta(alpha_hat)
    lower = max(1, math.floor(goal / step))
    upper = lower + 1
    best = upper if abs(upper * step - goal) < abs(lower * step - goal) else lower
    return best * step
