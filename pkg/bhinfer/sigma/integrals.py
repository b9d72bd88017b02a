"""Limiting variance of the one-step residual in the Gaussian regime.

The variance splits into an age-profile part ``sigma_x`` (variance of ``N_delta``
started from a stationary age) and a lineage part ``sigma_y``; the total is
``sigma_x + 2 alpha sigma_y``.
"""

from __future__ import annotations

import logging as log
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from bhinfer.errors import DomainError, NumericConsistencyError, UnsupportedAgeError
from bhinfer.lifetime import GammaLifetime, log_density, survival
from bhinfer.sim.sampling import SURVIVAL_FLOOR, sample_lifetime, sample_offspring_counts
from bhinfer.spectral import (
    critical_shape,
    h_delta,
    malthusian_alpha,
    mean_approx,
    residual_modulus,
    second_eigenvalue,
    stationary_age_density,
)

__all__ = [
    "SigmaBreakdown",
    "SigmaBudgets",
    "SigmaEstimate",
    "cond_mean_age",
    "critical_sigma",
    "sigma_breakdown",
    "sigma_total",
    "sigma_x",
    "sigma_y",
]

QUAD_RTOL = 1e-6
CRITICAL_WINDOW = 1e-6
H_TABLE_MIN = 8193
H_TABLE_PER_PANEL = 64
DECAY_FLOOR = 0.05


@dataclass(frozen=True)
class SigmaEstimate:
    """Monte-Carlo estimate with its standard error."""

    value: float
    stderr: float

    def __str__(self) -> str:
        return f"{self.value:.6g} +/- {self.stderr:.2g}"


@dataclass(frozen=True)
class SigmaBudgets:
    """Sample and node budgets of one limiting-variance evaluation.

    Parameters
    ----------
    mc_per_node : int
        Offspring-count samples per age node in ``sigma_x``.
    mc_zeta : int
        Lifetime samples shared by all nodes in ``sigma_y``.
    age_nodes : int
        Gauss-Legendre nodes of the age integral.
    x_nodes : int
        Gauss-Legendre nodes per lifetime-mean panel of the lineage integral.
    tail : float
        Neglected mass of both integrals.
    """

    mc_per_node: int = 100_000
    mc_zeta: int = 100_000
    age_nodes: int = 64
    x_nodes: int = 8
    tail: float = 1e-8

    def __post_init__(self) -> None:
        if self.mc_per_node < 2 or self.mc_zeta < 2:
            raise DomainError(f"Monte-Carlo budgets must be >= 2: {self}")
        if self.age_nodes < 2 or self.x_nodes < 2:
            raise DomainError(f"Quadrature node counts must be >= 2: {self}")
        if not 0 < self.tail < 1:
            raise DomainError(f"tail must be in (0, 1), got {self.tail}")

    def to_dict(self) -> dict:
        return {
            "mc_per_node": self.mc_per_node,
            "mc_zeta": self.mc_zeta,
            "age_nodes": self.age_nodes,
            "x_nodes": self.x_nodes,
            "tail": self.tail,
        }


@dataclass(frozen=True)
class SigmaBreakdown:
    alpha: float
    x: SigmaEstimate
    y: SigmaEstimate

    @property
    def total(self) -> SigmaEstimate:
        return SigmaEstimate(
            self.x.value + 2 * self.alpha * self.y.value,
            math.hypot(self.x.stderr, 2 * self.alpha * self.y.stderr),
        )


def _check_delta(delta: float) -> None:
    if not delta > 0:
        raise DomainError(f"delta must be > 0, got {delta}")


def _quad(func, lo: float, hi: float, what: str) -> float:
    result = integrate.quad(func, lo, hi, epsrel=QUAD_RTOL, limit=200, full_output=1)
    if len(result) == 4:
        raise NumericConsistencyError(f"Quadrature of {what} did not converge: {result[3]}")
    return result[0]


def cond_mean_age(law: GammaLifetime, a: float, delta: float) -> float:
    """Mean population at ``delta`` started from one individual of age ``a``.

    The first division at ``x`` contributes two copies of the newborn mean
    ``mean_approx(delta - x)``; no division leaves the single individual.
    """
    _check_delta(delta)
    if a < 0:
        raise DomainError(f"age must be >= 0, got {a}")
    surv_a = float(special.gammaincc(law.k, a / law.theta))
    if surv_a < SURVIVAL_FLOOR:
        raise UnsupportedAgeError(f"Survival underflows at age {a:g} for {law}")
    log_surv_a = math.log(surv_a)

    def integrand(x: float) -> float:
        return mean_approx(law, delta - x) * math.exp(log_density(law, a + x) - log_surv_a)

    divided = 2 * _quad(integrand, 0.0, delta, "the conditional mean")
    return divided + survival(law, a + delta) / math.exp(log_surv_a)


def _legendre(n: int, hi: float) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return hi / 2 * (nodes + 1), hi / 2 * weights


def _variance_with_error(samples: np.ndarray) -> tuple[float, float]:
    """Unbiased variance and its standard error from the fourth central moment."""
    n = len(samples)
    centred = samples - samples.mean()
    var = float(centred.var(ddof=1))
    m4 = float(np.mean(centred**4))
    se2 = max(m4 - (n - 3) / (n - 1) * var**2, 0.0) / n
    return var, math.sqrt(se2)


def _age_cutoff(law: GammaLifetime, tail: float) -> float:
    """Age beyond which the stationary profile holds less than ``tail`` mass."""
    alpha = malthusian_alpha(law)

    def excess(a: float) -> float:
        return math.log(2 * max(survival(law, a), 1e-320)) - alpha * a - math.log(tail)

    hi = math.log(2 / tail) / alpha
    if excess(hi) >= 0:
        return hi
    return optimize.brentq(excess, 0.0, hi, xtol=1e-10)


def sigma_x(
    law: GammaLifetime,
    delta: float,
    mc_per_node: int = 100_000,
    age_nodes: int = 64,
    rng: np.random.Generator | None = None,
    tail: float = 1e-8,
) -> SigmaEstimate:
    """Stationary-age average of ``Var_a(N_delta)``."""
    _check_delta(delta)
    rng = np.random.default_rng() if rng is None else rng
    ages, weights = _legendre(age_nodes, _age_cutoff(law, tail))
    weights = weights * stationary_age_density(law, ages)
    value, err2 = 0.0, 0.0
    for age, weight in zip(ages, weights):
        counts = sample_offspring_counts(law, age, delta, mc_per_node, rng).astype(float)
        var, se = _variance_with_error(counts)
        value += weight * var
        err2 += (weight * se) ** 2
    return SigmaEstimate(value, math.sqrt(err2))


def _composite_legendre(n: int, hi: float, panel: float) -> tuple[np.ndarray, np.ndarray]:
    """``n``-point Gauss-Legendre rule on each panel of width about ``panel`` in ``[0, hi]``."""
    n_panels = max(1, math.ceil(hi / panel))
    nodes, weights = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(0.0, hi, n_panels + 1)
    half = np.diff(edges)[:, None] / 2
    xs = edges[:-1, None] + half * (nodes + 1)
    return xs.ravel(), (half * weights).ravel()


def _lineage_decay(law: GammaLifetime) -> float:
    """Exponential decay rate of the lineage integrand, kept away from zero near ``k_c``."""
    alpha = malthusian_alpha(law)
    lambda_ = second_eigenvalue(law).real if law.k >= 2 else -alpha
    return max(alpha - 2 * max(lambda_, 0.0), DECAY_FLOOR * alpha)


def sigma_y(
    law: GammaLifetime,
    delta: float,
    mc_zeta: int = 100_000,
    x_nodes: int = 8,
    rng: np.random.Generator | None = None,
    tail: float = 1e-8,
) -> SigmaEstimate:
    """Lineage contribution: ``e^{-alpha x}``-weighted variance over the first lifetime ``zeta`` of

    ``(E_x[N_delta] - e^{alpha delta}) 1{x < zeta} + 2 h_delta(x - zeta) 1{x >= zeta}``.

    The same ``zeta`` draws are used at every node. The integral runs over panels of
    one mean lifetime with ``x_nodes`` points each, up to where the integrand envelope
    has decayed by ``tail``.
    """
    _check_delta(delta)
    rng = np.random.default_rng() if rng is None else rng
    alpha = malthusian_alpha(law)
    x_max = -math.log(tail) / _lineage_decay(law)
    xs, weights = _composite_legendre(x_nodes, x_max, law.mean())
    weights = weights * np.exp(-alpha * xs)

    zeta = np.asarray(sample_lifetime(rng, law, mc_zeta))
    growth = math.exp(alpha * delta)
    n_table = max(H_TABLE_MIN, H_TABLE_PER_PANEL * math.ceil(x_max / law.mean()) + 1)
    y_table = np.linspace(0.0, x_max, n_table)
    h_table = 2 * np.asarray(h_delta(law, y_table, delta))

    value, err2 = 0.0, 0.0
    for x, weight in zip(xs, weights):
        alive = zeta > x
        phi = np.interp(x - zeta, y_table, h_table)
        if alive.any():
            phi[alive] = cond_mean_age(law, x, delta) - growth
        var, se = _variance_with_error(phi)
        value += weight * var
        err2 += (weight * se) ** 2
    return SigmaEstimate(value, math.sqrt(err2))


def sigma_breakdown(
    law: GammaLifetime,
    delta: float,
    budgets: SigmaBudgets | None = None,
    rng_x: np.random.Generator | None = None,
    rng_y: np.random.Generator | None = None,
) -> SigmaBreakdown:
    budgets = budgets or SigmaBudgets()
    sx = sigma_x(law, delta, budgets.mc_per_node, budgets.age_nodes, rng_x, budgets.tail)
    sy = sigma_y(law, delta, budgets.mc_zeta, budgets.x_nodes, rng_y, budgets.tail)
    log.debug(f"{law}, delta={delta:g}: sigma_x={sx}, sigma_y={sy}")
    return SigmaBreakdown(malthusian_alpha(law), sx, sy)


def sigma_total(
    law: GammaLifetime,
    delta: float,
    budgets: SigmaBudgets | None = None,
    rng_x: np.random.Generator | None = None,
    rng_y: np.random.Generator | None = None,
) -> SigmaEstimate:
    return sigma_breakdown(law, delta, budgets, rng_x, rng_y).total


def critical_sigma(law: GammaLifetime, delta: float) -> float:
    """Closed-form limiting variance at the critical shape."""
    _check_delta(delta)
    k_c = critical_shape()
    if abs(law.k - k_c) > CRITICAL_WINDOW:
        raise DomainError(f"critical_sigma requires |k - k_c| <= {CRITICAL_WINDOW}, got k={law.k}")
    k = law.k
    alpha = malthusian_alpha(law)
    ratio = 2 ** (2 / k) / (2 ** (2 / k) - 2 ** (1 / k))
    return alpha / k**2 * ratio * residual_modulus(law, delta) ** 2
