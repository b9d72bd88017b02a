"""bh-infer-tools - Bellman-Harris simulation and lifetime inference from population counts."""

from __future__ import annotations

__version__ = "v0.1.0"

from bhinfer import hdf5
from bhinfer.dataset import CountMode, Dataset, read_dataset, write_dataset
from bhinfer.inference import run_pipeline
from bhinfer.lifetime import GammaLifetime
from bhinfer.mock import get_mock_dataset
from bhinfer.scenarios import Scenario, ScenarioContainer, Scenarios
from bhinfer.sigma import SigmaGrid, build_grid, lookup
from bhinfer.sim import SimConfig, simulate_ensemble, simulate_trajectory
from bhinfer.spectral import Regime, spectral_data

__all__ = [
    "CountMode",
    "Dataset",
    "GammaLifetime",
    "Regime",
    "Scenario",
    "ScenarioContainer",
    "Scenarios",
    "SigmaGrid",
    "SimConfig",
    "__version__",
    "build_grid",
    "get_mock_dataset",
    "hdf5",
    "lookup",
    "read_dataset",
    "run_pipeline",
    "simulate_ensemble",
    "simulate_trajectory",
    "spectral_data",
    "write_dataset",
]
