"""Synthetic datasets with exactly known growth and fluctuation rates."""

from __future__ import annotations

from pathlib import Path
from tempfile import NamedTemporaryFile, mkdtemp

import numpy as np

from bhinfer.dataset import CountMode, Dataset, write_dataset
from bhinfer.lifetime import GammaLifetime
from bhinfer.spectral import LOG2, malthusian_alpha, second_eigenvalue

__all__ = ["get_mock_dataset", "mock_exponential", "mock_oscillating"]


def mock_exponential(
    alpha: float = 0.02, n_data: int = 4, n_times: int = 50, grid_step: float = 1.0
) -> Dataset:
    """Trajectories ``c_j e^{alpha t}``, exact straight lines in log scale."""
    times = grid_step * np.arange(n_times)
    scales = 1.0 + np.arange(n_data)
    counts = scales[:, None] * np.exp(alpha * times)[None, :]
    return Dataset(grid_step, counts, count_mode=CountMode.PROPORTIONAL)


def mock_oscillating(
    law: GammaLifetime | None = None,
    n_data: int = 8,
    doublings: int = 30,
    steps_per_doubling: int = 8,
    amplitude: float = 0.1,
) -> Dataset:
    """Growth mode plus one oscillating mode with phases spread evenly over trajectories.

    Trajectory ``j`` is ``e^{alpha t} + amplitude * Re(e^{i phi_j} e^{(lambda + i tau) t})``
    with ``phi_j = 2 pi j / n_data``, so the residual variance across trajectories
    grows exactly like ``e^{2 lambda t}``.
    """
    law = law or GammaLifetime(70, 1.0)
    if n_data < 3:
        raise ValueError(f"Need at least three phases, got n_data={n_data}")
    alpha = malthusian_alpha(law)
    rho = second_eigenvalue(law)
    grid_step = LOG2 / (steps_per_doubling * alpha)
    times = grid_step * np.arange(doublings * steps_per_doubling + 1)
    phases = 2 * np.pi * np.arange(n_data) / n_data
    modes = np.real(np.exp(1j * phases)[:, None] * np.exp(rho * times)[None, :])
    counts = np.exp(alpha * times)[None, :] + amplitude * modes
    return Dataset(
        grid_step,
        counts,
        count_mode=CountMode.PROPORTIONAL,
        metadata={"k": repr(law.k), "theta": repr(law.theta)},
    )


def get_mock_dataset(
    kind: str = "oscillating", fname: Path | str | None = None, **kwargs
) -> tuple[Path | str, Dataset]:
    makers = {"exponential": mock_exponential, "oscillating": mock_oscillating}
    if kind not in makers:
        raise ValueError(f"Unknown mock dataset kind {kind!r}, choose from {list(makers)}")
    ds = makers[kind](**kwargs)

    # create a tempfile in a new folder
    if fname is None:
        fname = NamedTemporaryFile(suffix=".csv", dir=mkdtemp()).name
    else:
        Path(fname).parent.mkdir(exist_ok=True, parents=True)
    write_dataset(ds, fname)
    return fname, ds
