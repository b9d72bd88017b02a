"""Event-driven simulation of binary-splitting Bellman-Harris populations.

Every live individual is a heap entry ``(division_time, birth_time)``. Popping the
earliest entry replaces the individual by two newborns, which is the only place the
offspring rule is encoded (see ``_divide``).
"""

from __future__ import annotations

import heapq
import logging as log
import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from bhinfer.dataset import CountMode, Dataset
from bhinfer.errors import BHError, DomainError, PopulationLimitError, ReplicateError
from bhinfer.lifetime import GammaLifetime
from bhinfer.sim.sampling import sample_residual_lifetime
from bhinfer.streams import default_workers, parallel_map, stream

__all__ = ["Ensemble", "SimConfig", "Trajectory", "simulate_ensemble", "simulate_trajectory"]

SAFETY_CAP = 10**7
LIFETIME_BLOCK = 4096


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings shared by all replicates.

    Parameters
    ----------
    grid_step : float
        Spacing of the observation grid.
    n_grid : int
        Index of the last grid point, observations are taken at ``i * grid_step``
        for ``i = 0 .. n_grid``.
    seed : int
        Root seed, replicate ``j`` draws from ``stream(seed, j)``.
    pop_cap : int, optional
        Stop a trajectory when its population first reaches this size.
    initial : tuple of (count, age)
        Founding population, one newborn by default.
    safety_cap : int
        Hard limit on the population of a single trajectory.
    """

    grid_step: float
    n_grid: int
    seed: int = 0
    pop_cap: int | None = None
    initial: tuple[tuple[int, float], ...] = ((1, 0.0),)
    safety_cap: int = SAFETY_CAP

    def __post_init__(self) -> None:
        if not all(float(c).is_integer() for c, _ in self.initial):
            raise DomainError(f"Initial counts must be integers: {self.initial}")
        object.__setattr__(self, "initial", tuple((int(c), float(a)) for c, a in self.initial))
        if not math.isfinite(self.grid_step) or self.grid_step <= 0:
            raise DomainError(f"grid_step must be > 0, got {self.grid_step}")
        if self.n_grid < 2:
            raise DomainError(f"n_grid must be >= 2, got {self.n_grid}")
        if any(c < 0 for c, _ in self.initial) or self.initial_count < 1:
            raise DomainError(f"Initial population must not be empty: {self.initial}")
        if any(a < 0 for _, a in self.initial):
            raise DomainError(f"Initial ages must be >= 0: {self.initial}")
        if self.pop_cap is not None and self.pop_cap <= self.initial_count:
            raise DomainError(
                f"pop_cap={self.pop_cap} must exceed the initial population {self.initial_count}"
            )

    @property
    def initial_count(self) -> int:
        return sum(c for c, _ in self.initial)

    @property
    def times(self) -> np.ndarray:
        return self.grid_step * np.arange(self.n_grid + 1)

    @property
    def horizon(self) -> float:
        return self.grid_step * self.n_grid


@dataclass
class Trajectory:
    """Counts of one replicate on the observation grid.

    Entries from ``truncated_at`` on were not observed and are stored as 0.
    ``ages`` holds the ages of the live population when the run stopped, if requested.
    """

    times: np.ndarray
    counts: np.ndarray
    truncated_at: int | None = None
    ages: np.ndarray | None = None

    @property
    def valid(self) -> np.ndarray:
        mask = np.ones(len(self.counts), dtype=bool)
        if self.truncated_at is not None:
            mask[self.truncated_at :] = False
        return mask


class _LifetimeBuffer:
    def __init__(self, rng: np.random.Generator, law: GammaLifetime):
        self.rng = rng
        self.law = law
        self.block = np.empty(0)
        self.pos = 0

    def next(self) -> float:
        if self.pos == len(self.block):
            self.block = self.rng.gamma(self.law.k, self.law.theta, LIFETIME_BLOCK)
            self.pos = 0
        value = self.block[self.pos]
        self.pos += 1
        return float(value)


def _divide(queue: list, now: float, lifetimes: _LifetimeBuffer) -> int:
    """Replace the individual dividing at ``now`` by two newborns, return the size change."""
    heapq.heapreplace(queue, (now + lifetimes.next(), now))
    heapq.heappush(queue, (now + lifetimes.next(), now))
    return 1


def simulate_trajectory(
    cfg: SimConfig, law: GammaLifetime, replicate_index: int = 0, record_ages: bool = False
) -> Trajectory:
    rng = stream(cfg.seed, replicate_index)
    queue: list[tuple[float, float]] = []
    for count, age in cfg.initial:
        if count == 0:
            continue
        residual = np.atleast_1d(sample_residual_lifetime(rng, law, age, size=count))
        queue.extend((float(r), -age) for r in residual)
    heapq.heapify(queue)
    lifetimes = _LifetimeBuffer(rng, law)

    times = cfg.times
    counts = np.zeros(len(times), dtype=np.int64)
    population = len(queue)
    truncated_at = None
    stop_time = cfg.horizon
    for i, t in enumerate(times):
        while queue[0][0] <= t:
            now = queue[0][0]
            population += _divide(queue, now, lifetimes)
            if population > cfg.safety_cap:
                raise PopulationLimitError(
                    f"Population exceeded the safety cap of {cfg.safety_cap} at t={now:g}"
                )
            if cfg.pop_cap is not None and population >= cfg.pop_cap:
                truncated_at, stop_time = i, now
                break
        if truncated_at is not None:
            break
        counts[i] = population

    ages = None
    if record_ages:
        ages = np.array([stop_time - birth for _, birth in queue])
    return Trajectory(times=times, counts=counts, truncated_at=truncated_at, ages=ages)


def _simulate_replicate(cfg: SimConfig, law: GammaLifetime, index: int) -> Trajectory:
    try:
        return simulate_trajectory(cfg, law, index)
    except BHError as e:
        raise ReplicateError(index, e) from e


@dataclass
class Ensemble:
    config: SimConfig
    law: GammaLifetime
    trajectories: list[Trajectory] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def counts(self) -> np.ndarray:
        return np.vstack([tr.counts for tr in self.trajectories])

    @property
    def valid(self) -> np.ndarray:
        return np.vstack([tr.valid for tr in self.trajectories])

    def to_dataset(self, units: str = "time") -> Dataset:
        """Dataset of all replicates with post-cap entries masked."""
        metadata = {"seed": self.config.seed, "k": repr(self.law.k), "theta": repr(self.law.theta)}
        if self.config.pop_cap is not None:
            metadata["pop_cap"] = self.config.pop_cap
        return Dataset(
            grid_step=self.config.grid_step,
            counts=self.counts.astype(float),
            valid=self.valid,
            units=units,
            count_mode=CountMode.ABSOLUTE,
            metadata=metadata,
        )


def simulate_ensemble(
    cfg: SimConfig, law: GammaLifetime, n_data: int, n_workers: int | None = None
) -> Ensemble:
    """Simulate ``n_data`` independent replicates.

    Results do not depend on ``n_workers``: replicate ``j`` always uses ``stream(seed, j)``.
    """
    if n_data < 1:
        raise DomainError(f"n_data must be >= 1, got {n_data}")
    if n_workers is None:
        n_workers = default_workers()
    chunksize = max(1, n_data // (4 * max(n_workers, 1)))
    trajectories = parallel_map(
        partial(_simulate_replicate, cfg, law), range(n_data), n_workers, chunksize
    )
    n_truncated = sum(tr.truncated_at is not None for tr in trajectories)
    if n_truncated:
        log.info(f"{n_truncated}/{n_data} trajectories reached pop_cap={cfg.pop_cap}")
    return Ensemble(cfg, law, trajectories)
