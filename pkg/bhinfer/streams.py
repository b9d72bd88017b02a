"""Reproducible random streams and order-preserving parallel maps."""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor

import numpy as np

__all__ = ["NUM_THREADS_ENV", "default_workers", "parallel_map", "stream"]

NUM_THREADS_ENV = "BHINFER_NUM_THREADS"


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Generator fully determined by ``seed`` and the integer ``keys``.

    Replicate ``j`` of a run uses ``stream(seed, j)``, so the draws do not depend on
    which worker simulates it or in which order.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def default_workers() -> int:
    value = os.environ.get(NUM_THREADS_ENV, "1")
    try:
        workers = int(value)
    except ValueError:
        raise ValueError(f"{NUM_THREADS_ENV} must be an integer, got {value!r}") from None
    if workers < 1:
        raise ValueError(f"{NUM_THREADS_ENV} must be >= 1, got {workers}")
    return workers


def parallel_map(
    func: Callable, items: Iterable, n_workers: int | None = None, chunksize: int = 1
) -> list:
    """Map ``func`` over ``items`` and return results in input order.

    ``func`` must be picklable when ``n_workers > 1``.
    """
    items = list(items)
    if n_workers is None:
        n_workers = default_workers()
    if n_workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
