"""Monte-Carlo simulation of Gamma Bellman-Harris populations."""

from __future__ import annotations

from bhinfer.sim.engine import (
    Ensemble,
    SimConfig,
    Trajectory,
    simulate_ensemble,
    simulate_trajectory,
)
from bhinfer.sim.sampling import (
    moments_from_age,
    sample_lifetime,
    sample_offspring_counts,
    sample_residual_lifetime,
)

__all__ = [
    "Ensemble",
    "SimConfig",
    "Trajectory",
    "moments_from_age",
    "sample_lifetime",
    "sample_offspring_counts",
    "sample_residual_lifetime",
    "simulate_ensemble",
    "simulate_trajectory",
]
