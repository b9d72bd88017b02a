from __future__ import annotations

import numpy as np
import pytest

from bhinfer.sigma import SigmaBudgets, SigmaGrid, build_grid


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run acceptance-scale tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def toy_grid():
    """Monotone grid with hand-picked values, no Monte-Carlo involved."""
    k_values = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    sigma2_x = np.array([2.0, 1.6, 1.3, 1.1, 1.0])
    sigma2_y = np.array([0.0, 0.05, 0.05, 0.025, 0.0])
    return SigmaGrid(
        mesh=1.0,
        k_values=k_values,
        sigma2=sigma2_x + 2 * sigma2_y,
        sigma2_x=sigma2_x,
        sigma2_y=sigma2_y,
        stderr=np.full(5, 0.01),
        stderr_x=np.full(5, 0.01),
        stderr_y=np.full(5, 0.001),
        budgets=SigmaBudgets(mc_per_node=100, mc_zeta=100, age_nodes=4, x_nodes=4),
    )


@pytest.fixture(scope="session")
def working_grid():
    """Full-budget grid on the shape mesh 0.1, built once per session."""
    return build_grid(0.1, seed=0)
