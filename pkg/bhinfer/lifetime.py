"""Gamma lifetime law of the dividing individuals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from bhinfer.errors import DomainError, PoleError

__all__ = ["GammaLifetime", "density", "laplace", "log_density", "log_survival", "survival"]

POLE_TOL = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class GammaLifetime:
    """Gamma(k, theta) lifetime with shape ``k >= 1`` and scale ``theta > 0``.

    Parameters
    ----------
    k : float
        Shape parameter, dimensionless.
    theta : float
        Scale parameter, in time units.
    """

    k: float
    theta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.k) or self.k < 1:
            raise DomainError(f"Gamma shape must satisfy k >= 1, got {self.k}")
        if not math.isfinite(self.theta) or self.theta <= 0:
            raise DomainError(f"Gamma scale must satisfy theta > 0, got {self.theta}")

    @classmethod
    def from_mean_cv(cls, mu: float, cv: float) -> GammaLifetime:
        if mu <= 0 or cv <= 0:
            raise DomainError(f"Mean and CV must be positive, got mu={mu}, cv={cv}")
        k = 1 / cv**2
        return cls(k, mu / k)

    @classmethod
    def from_alpha(cls, k: float, alpha: float) -> GammaLifetime:
        """Law of shape ``k`` whose Malthusian rate equals ``alpha``."""
        if alpha <= 0:
            raise DomainError(f"Malthusian rate must be positive, got {alpha}")
        return cls(k, math.expm1(math.log(2) / k) / alpha)

    def mean(self) -> float:
        return self.k * self.theta

    def std(self) -> float:
        return math.sqrt(self.k) * self.theta

    def cv(self) -> float:
        return 1 / math.sqrt(self.k)

    def __str__(self) -> str:
        return f"Gamma(k={self.k:g}, theta={self.theta:g})"


def _check_time(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"{name} must be >= 0, got {values}")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def density(law: GammaLifetime, t):
    """Probability density ``g(t)`` of the lifetime."""
    return _out(np.exp(log_density(law, t)))


def survival(law: GammaLifetime, a):
    """Survival function ``1 - G(a)``, the regularised upper incomplete gamma."""
    a = _check_time(a, "age")
    return _out(special.gammaincc(law.k, a / law.theta))


def log_survival(law: GammaLifetime, a):
    a = _check_time(a, "age")
    with np.errstate(divide="ignore"):
        return _out(np.log(special.gammaincc(law.k, a / law.theta)))


def laplace(law: GammaLifetime, rho):
    """Laplace transform ``1 / (1 + rho theta)^k`` on the principal branch.

    Values left of ``Re(rho) = -1/theta`` are the analytic continuation.
    Arguments within rounding of ``-1/theta`` are treated as the pole.
    """
    scaled = np.asarray(rho, dtype=complex) * law.theta
    base = 1 + scaled
    if np.any(np.abs(base) <= POLE_TOL * np.maximum(1.0, np.abs(scaled))):
        raise PoleError(f"Laplace transform has a pole at rho = {-1 / law.theta}")
    value = np.power(base, -law.k)
    return complex(value) if value.ndim == 0 else value


def log_density(law: GammaLifetime, t):
    t = _check_time(t, "time")
    return _out(
        special.xlogy(law.k - 1, t)
        - t / law.theta
        - special.gammaln(law.k)
        - law.k * math.log(law.theta)
    )
