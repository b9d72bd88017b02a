"""Random variates of the lifetime law and offspring counts over a short horizon."""

from __future__ import annotations

import numpy as np
from scipy import special

from bhinfer.errors import DomainError, PopulationLimitError, UnsupportedAgeError
from bhinfer.lifetime import GammaLifetime

__all__ = [
    "moments_from_age",
    "sample_lifetime",
    "sample_offspring_counts",
    "sample_residual_lifetime",
]

SURVIVAL_FLOOR = 1e-300
OFFSPRING_SAFETY_CAP = 10**7


def sample_lifetime(rng: np.random.Generator, law: GammaLifetime, size=None):
    """Draw lifetimes from Gamma(k, theta)."""
    return rng.gamma(law.k, law.theta, size=size)


def sample_residual_lifetime(rng: np.random.Generator, law: GammaLifetime, age, size=None):
    """Draw the remaining lifetime of individuals that have already reached ``age``.

    The draw inverts the conditional survival ``S(age + x) / S(age)`` through the
    inverse regularised upper incomplete gamma, so it stays exact for old individuals
    where rejection from fresh lifetimes would almost never accept.

    Parameters
    ----------
    rng : np.random.Generator
        Source of randomness.
    law : GammaLifetime
        Lifetime law.
    age : float or array_like
        Current age(s), ``>= 0``. Broadcast against ``size``.
    size : int or tuple, optional
        Output shape.

    Returns
    -------
    float or np.ndarray
        Strictly positive residual lifetimes.

    Raises
    ------
    UnsupportedAgeError
        If the survival function underflows at ``age``.
    """
    age_arr = np.asarray(age, dtype=float)
    if np.any(age_arr < 0) or np.any(np.isnan(age_arr)):
        raise DomainError(f"age must be >= 0, got {age}")
    if not np.any(age_arr > 0):
        if size is None and age_arr.ndim:
            size = age_arr.shape
        return sample_lifetime(rng, law, size)

    surv = special.gammaincc(law.k, age_arr / law.theta)
    if np.any(surv < SURVIVAL_FLOOR):
        raise UnsupportedAgeError(
            f"Survival underflows at age {age_arr.max():g} for {law}, residual lifetime is"
            " not representable"
        )
    if size is None and age_arr.ndim:
        size = age_arr.shape
    u = 1.0 - rng.random(size)
    x = law.theta * special.gammainccinv(law.k, u * surv) - age_arr
    x = np.maximum(x, np.finfo(float).tiny)
    return float(x) if np.ndim(x) == 0 else x


def sample_offspring_counts(
    law: GammaLifetime, age: float, delta: float, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Population sizes at time ``delta`` of ``n`` independent processes, each started
    from one individual of age ``age``.

    Generations are advanced together: every individual that divides before ``delta``
    adds one to its founder's count and hands two fresh lifetimes to the next round.
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    counts = np.ones(n, dtype=np.int64)
    founders = np.arange(n)
    division = np.asarray(sample_residual_lifetime(rng, law, age, size=n), dtype=float)
    while founders.size:
        dividing = division <= delta
        founders, division = founders[dividing], division[dividing]
        if not founders.size:
            break
        counts += np.bincount(founders, minlength=n)
        if 2 * founders.size > OFFSPRING_SAFETY_CAP:
            raise PopulationLimitError(
                f"More than {OFFSPRING_SAFETY_CAP} live individuals within delta={delta:g}"
            )
        founders = np.repeat(founders, 2)
        division = np.repeat(division, 2) + sample_lifetime(rng, law, founders.size)
    return counts


def moments_from_age(
    law: GammaLifetime, age: float, delta: float, n_mc: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample mean and unbiased sample variance of ``N_delta`` started from age ``age``."""
    if n_mc < 2:
        raise DomainError(f"n_mc must be >= 2, got {n_mc}")
    counts = sample_offspring_counts(law, age, delta, n_mc, rng)
    return float(counts.mean()), float(counts.var(ddof=1))
