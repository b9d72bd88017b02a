"""Precomputed table of the Gaussian-regime limiting variance over the shape parameter."""

from __future__ import annotations

import logging as log
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial

import numpy as np

from bhinfer.errors import BHError, DomainError, GridBuildError
from bhinfer.lifetime import GammaLifetime
from bhinfer.sigma.integrals import SigmaBreakdown, SigmaBudgets, sigma_breakdown
from bhinfer.spectral import LOG2, critical_shape
from bhinfer.streams import default_workers, parallel_map, stream

__all__ = ["DeltaConvention", "SigmaGrid", "build_grid", "grid_shapes", "lookup"]

SMOOTHNESS_LIMIT = 0.2
_ARRAY_FIELDS = ("k_values", "sigma2", "sigma2_x", "sigma2_y", "stderr", "stderr_x", "stderr_y")


class DeltaConvention(str, Enum):
    FULL = "log2/alpha"
    HALF = "log2/(2alpha)"

    def __str__(self) -> str:
        return self.value

    def delta(self, alpha: float) -> float:
        return LOG2 / alpha if self is DeltaConvention.FULL else LOG2 / (2 * alpha)


@dataclass
class SigmaGrid:
    """Limiting variance ``sigma_x + 2 alpha sigma_y`` tabulated on shapes ``1 + p l``."""

    mesh: float
    k_values: np.ndarray
    sigma2: np.ndarray
    sigma2_x: np.ndarray
    sigma2_y: np.ndarray
    stderr: np.ndarray
    stderr_x: np.ndarray
    stderr_y: np.ndarray
    delta_convention: DeltaConvention = DeltaConvention.FULL
    alpha: float = 1.0
    seed: int = 0
    budgets: SigmaBudgets = field(default_factory=SigmaBudgets)

    def __post_init__(self) -> None:
        self.delta_convention = DeltaConvention(self.delta_convention)
        for name in _ARRAY_FIELDS:
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.mesh <= 0:
            raise DomainError(f"mesh must be > 0, got {self.mesh}")
        if len(self.k_values) < 2:
            raise DomainError("A grid needs at least two nodes")
        if np.any(np.diff(self.k_values) <= 0):
            raise DomainError("k_values must be strictly increasing")
        if self.k_values[-1] >= critical_shape():
            raise DomainError(f"Grid nodes must lie below k_c, got {self.k_values[-1]}")
        if not np.all(np.isfinite(self.sigma2)) or np.any(self.sigma2 <= 0):
            raise DomainError("sigma2 entries must be positive and finite")
        if np.any(self.sigma2_y < 0):
            raise DomainError("sigma2_y entries must be >= 0")
        if not np.allclose(self.sigma2, self.sigma2_x + 2 * self.alpha * self.sigma2_y, rtol=1e-12):
            raise DomainError("sigma2 must equal sigma2_x + 2 alpha sigma2_y")

    def __len__(self) -> int:
        return len(self.k_values)

    @property
    def delta(self) -> float:
        return self.delta_convention.delta(self.alpha)

    @property
    def k_range(self) -> tuple[float, float]:
        return float(self.k_values[0]), float(self.k_values[-1])

    def max_relative_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.sigma2)) / self.sigma2[:-1]))

    def is_monotone(self) -> bool:
        steps = np.diff(self.sigma2)
        return bool(np.all(steps > 0) or np.all(steps < 0))

    def diagnostics(self) -> dict:
        return {"max_relative_jump": self.max_relative_jump(), "monotone": self.is_monotone()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SigmaGrid):
            return NotImplemented
        arrays = ("k_values", "sigma2", "sigma2_x", "sigma2_y", "stderr", "stderr_x", "stderr_y")
        return (
            self.mesh == other.mesh
            and self.delta_convention == other.delta_convention
            and self.alpha == other.alpha
            and self.seed == other.seed
            and self.budgets == other.budgets
            and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays)
        )


def grid_shapes(mesh: float) -> np.ndarray:
    """Shapes ``1 + mesh * l`` for ``l = 0 .. floor((k_c - 1) / mesh) - 1``."""
    if mesh <= 0:
        raise DomainError(f"mesh must be > 0, got {mesh}")
    n = math.floor((critical_shape() - 1) / mesh)
    return 1 + mesh * np.arange(n)


def _build_node(
    delta_convention: DeltaConvention,
    alpha: float,
    budgets: SigmaBudgets,
    seed: int,
    item: tuple[int, float],
) -> tuple[float, SigmaBreakdown | None, str | None]:
    index, k = item
    try:
        law = GammaLifetime.from_alpha(k, alpha)
        result = sigma_breakdown(
            law,
            delta_convention.delta(alpha),
            budgets,
            rng_x=stream(seed, index, 0),
            rng_y=stream(seed, index, 1),
        )
    except BHError as e:
        return k, None, str(e)
    log.info(f"Grid node k={k:g}: sigma2={result.total}")
    return k, result, None


def build_grid(
    mesh: float,
    delta_convention: DeltaConvention | str = DeltaConvention.FULL,
    budgets: SigmaBudgets | None = None,
    seed: int = 0,
    alpha: float = 1.0,
    n_workers: int | None = None,
    k_values=None,
    require_monotone: bool | None = None,
) -> SigmaGrid:
    """Build a :class:`SigmaGrid`.

    Parameters
    ----------
    mesh : float
        Grid spacing ``p`` of the shape parameter.
    delta_convention : DeltaConvention | str, optional
        Observation step relative to the growth rate, by default ``log2/alpha``.
    budgets : SigmaBudgets, optional
        Monte-Carlo and quadrature budgets per node.
    seed : int, optional
        Root seed, node ``i`` draws from ``stream(seed, i, ...)``.
    alpha : float, optional
        Growth rate the grid is built at, by default 1.
    n_workers : int, optional
        Worker processes, defaults to ``BHINFER_NUM_THREADS``.
    k_values : array_like, optional
        Explicit nodes replacing ``grid_shapes(mesh)``.
    require_monotone : bool, optional
        Reject grids whose values are not strictly monotone. Defaults to True for the
        ``log2/alpha`` convention, where the argmin estimator relies on it.

    Returns
    -------
    SigmaGrid
        Built grid.

    Raises
    ------
    GridBuildError
        If any node fails or a required diagnostic does not hold.
    """
    delta_convention = DeltaConvention(delta_convention)
    budgets = budgets or SigmaBudgets()
    if require_monotone is None:
        require_monotone = delta_convention is DeltaConvention.FULL
    if n_workers is None:
        n_workers = default_workers()
    k_values = grid_shapes(mesh) if k_values is None else np.asarray(k_values, dtype=float)

    node = partial(_build_node, delta_convention, alpha, budgets, seed)
    results = parallel_map(node, list(enumerate(k_values)), n_workers)
    failed = [(k, msg) for k, res, msg in results if res is None]
    if failed:
        for k, msg in failed:
            log.error(f"Grid node k={k:g} failed: {msg}")
        raise GridBuildError(
            f"{len(failed)} of {len(results)} grid nodes failed", [k for k, _ in failed]
        )

    parts = [res for _, res, _ in results]
    totals = [p.total for p in parts]
    try:
        grid = SigmaGrid(
            mesh=mesh,
            k_values=k_values,
            sigma2=[t.value for t in totals],
            sigma2_x=[p.x.value for p in parts],
            sigma2_y=[p.y.value for p in parts],
            stderr=[t.stderr for t in totals],
            stderr_x=[p.x.stderr for p in parts],
            stderr_y=[p.y.stderr for p in parts],
            delta_convention=delta_convention,
            alpha=alpha,
            seed=seed,
            budgets=budgets,
        )
    except DomainError as e:
        raise GridBuildError(f"Built grid is invalid: {e}", []) from e
    if (jump := grid.max_relative_jump()) > SMOOTHNESS_LIMIT:
        log.warning(f"Grid is not smooth: max relative jump between nodes is {jump:.1%}")
    if require_monotone and not grid.is_monotone():
        raise GridBuildError("Grid values are not strictly monotone in k", [])
    return grid


def lookup(grid: SigmaGrid, k):
    """Piecewise-linear interpolation of the tabulated variance."""
    k_arr = np.asarray(k, dtype=float)
    lo, hi = grid.k_range
    if np.any(k_arr < lo) or np.any(k_arr > hi):
        raise DomainError(f"k={k} outside the grid range [{lo:g}, {hi:g}]")
    value = np.interp(k_arr, grid.k_values, grid.sigma2)
    return float(value) if value.ndim == 0 else value
