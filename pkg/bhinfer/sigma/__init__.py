"""Limiting variance of the Gaussian regime and its precomputed grid."""

from __future__ import annotations

from bhinfer.sigma.grid import DeltaConvention, SigmaGrid, build_grid, grid_shapes, lookup
from bhinfer.sigma.integrals import (
    SigmaBreakdown,
    SigmaBudgets,
    SigmaEstimate,
    cond_mean_age,
    critical_sigma,
    sigma_breakdown,
    sigma_total,
    sigma_x,
    sigma_y,
)

__all__ = [
    "DeltaConvention",
    "SigmaBreakdown",
    "SigmaBudgets",
    "SigmaEstimate",
    "SigmaGrid",
    "build_grid",
    "cond_mean_age",
    "critical_sigma",
    "grid_shapes",
    "lookup",
    "sigma_breakdown",
    "sigma_total",
    "sigma_x",
    "sigma_y",
]
