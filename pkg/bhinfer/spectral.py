"""Analytic layer: eigenvalues, regimes and closed-form moments of the Gamma Bellman-Harris process.

Every function here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import optimize

from bhinfer.errors import DomainError, NoSubdominantEigenvalueError, NumericConsistencyError
from bhinfer.lifetime import GammaLifetime, survival

__all__ = [
    "Regime",
    "SpectralData",
    "classify_regime",
    "critical_shape",
    "eigenvalue_set",
    "h_delta",
    "large_k_modulus",
    "malthusian_alpha",
    "mean_approx",
    "residual_modulus",
    "second_eigenvalue",
    "spectral_data",
    "stationary_age_density",
    "var_ratio_q",
    "var_ratio_q_derivative",
    "yule_mean",
    "yule_residual_variance",
    "yule_variance",
]

LOG2 = math.log(2)
CRITICAL_TOL = 1e-9
IMAG_RESIDUE_TOL = 1e-9


class Regime(str, Enum):
    GAUSSIAN = "gaussian"
    CRITICAL = "critical"
    OSCILLATING = "oscillating"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class SpectralData:
    """Malthusian rate and subdominant eigenvalue ``lambda_ + i tau`` of a law.

    ``lambda_`` and ``tau`` are ``None`` for ``k < 2`` where alpha is the only root.
    """

    alpha: float
    lambda_: float | None
    tau: float | None
    regime: Regime

    @property
    def spectral_gap(self) -> float | None:
        return None if self.lambda_ is None else self.alpha - self.lambda_


def malthusian_alpha(law: GammaLifetime) -> float:
    return math.expm1(LOG2 / law.k) / law.theta


def _branches(k: float) -> np.ndarray:
    return np.arange(-math.ceil(k / 2) + 1, math.floor(k / 2) + 1)


def _roots(law: GammaLifetime) -> np.ndarray:
    """``2^(1/k) exp(2 pi i l / k)`` for every admissible branch index ``l``."""
    return 2 ** (1 / law.k) * np.exp(2j * np.pi * _branches(law.k) / law.k)


def eigenvalue_set(law: GammaLifetime) -> list[complex]:
    """All roots of ``laplace(law, rho) = 1/2`` on the principal branch."""
    return [complex(rho) for rho in (_roots(law) - 1) / law.theta]


def second_eigenvalue(law: GammaLifetime) -> complex:
    if law.k < 2:
        raise NoSubdominantEigenvalueError(
            f"No subdominant eigenvalue for k={law.k} < 2: the eigenvalue set is {{alpha}}"
        )
    scale = 2 ** (1 / law.k)
    phase = 2 * math.pi / law.k
    return complex((scale * math.cos(phase) - 1) / law.theta, scale * math.sin(phase) / law.theta)


def _critical_function(k: float) -> float:
    return math.cos(2 * math.pi / k) - (2 ** (-1 / k) + 1) / 2


@lru_cache(maxsize=None)
def critical_shape() -> float:
    """Shape ``k_c`` at which ``lambda = alpha / 2``."""
    return optimize.brentq(_critical_function, 10.0, 100.0, xtol=1e-12)


def classify_regime(k: float) -> Regime:
    if k < 1:
        raise DomainError(f"Gamma shape must satisfy k >= 1, got {k}")
    k_c = critical_shape()
    if abs(k - k_c) <= CRITICAL_TOL:
        return Regime.CRITICAL
    return Regime.GAUSSIAN if k < k_c else Regime.OSCILLATING


def spectral_data(law: GammaLifetime) -> SpectralData:
    alpha = malthusian_alpha(law)
    lambda_ = tau = None
    if law.k >= 2:
        rho = second_eigenvalue(law)
        lambda_, tau = rho.real, rho.imag
    return SpectralData(alpha, lambda_, tau, classify_regime(law.k))


def _modes(law: GammaLifetime) -> tuple[np.ndarray, np.ndarray]:
    """Residues and exponents of the partial-fraction expansion of the mean."""
    z = _roots(law)
    return z / (z - 1) / (2 * law.k), (z - 1) / law.theta


def _modal_sum(coeffs: np.ndarray, rates: np.ndarray, t: np.ndarray) -> np.ndarray:
    total = np.zeros(t.shape, dtype=complex)
    scale = np.zeros(t.shape)
    for c, r in zip(coeffs, rates):
        term = c * np.exp(r * t)
        total += term
        scale += np.abs(term)
    residue = np.abs(total.imag)
    if np.any(residue > IMAG_RESIDUE_TOL * np.maximum(scale, np.finfo(float).tiny)):
        raise NumericConsistencyError(
            f"Modal sum has an imaginary residue of {residue.max():.3g}, expected a real value"
        )
    return total.real


def _as_times(t, name: str) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"{name} must be >= 0")
    return t


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def mean_approx(law: GammaLifetime, t):
    """Closed-form approximation of ``E[N_t]`` from one newborn individual.

    Exact for integer ``k``; otherwise the error decays exponentially in ``t``.
    """
    t = _as_times(t, "time")
    coeffs, rates = _modes(law)
    return _out(_modal_sum(coeffs, rates, t))


def h_delta(law: GammaLifetime, y, delta: float):
    """``E[N_{y+delta}] - e^{alpha delta} E[N_y]`` for ``y >= 0``, and 0 for ``y < 0``.

    The alpha-mode is removed analytically, so only subdominant modes remain.
    """
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    y = np.asarray(y, dtype=float)
    coeffs, rates = _modes(law)
    alpha = malthusian_alpha(law)
    keep = _branches(law.k) != 0
    weights = coeffs[keep] * (np.exp(rates[keep] * delta) - math.exp(alpha * delta))
    positive = y >= 0
    out = np.zeros(y.shape)
    if keep.any():
        out[positive] = _modal_sum(weights, rates[keep], y[positive])
    return _out(out)


def stationary_age_density(law: GammaLifetime, a):
    """Stationary age density ``2 alpha e^{-alpha a} (1 - G(a))``."""
    a = _as_times(a, "age")
    alpha = malthusian_alpha(law)
    return _out(2 * alpha * np.exp(-alpha * a) * np.asarray(survival(law, a)))


def var_ratio_q(cv):
    """Limit of ``Var(N_t) / E[N_t]^2`` as a function of the lifetime CV.

    Plain arithmetic so that ``fractions.Fraction`` inputs stay exact where possible.
    """
    if cv <= 0:
        raise DomainError(f"Coefficient of variation must be > 0, got {cv}")
    x2 = cv * cv
    r = (2 ** (x2 + 1) - 1) ** (-1 / x2)
    return (4 * r - 1) / (1 - 2 * r)


def var_ratio_q_derivative(cv: float, step: float = 1e-6) -> float:
    return (var_ratio_q(cv + step) - var_ratio_q(cv - step)) / (2 * step)


def residual_modulus(law: GammaLifetime, delta: float) -> float:
    """``|e^{(lambda + i tau) delta} - e^{alpha delta}|``, the weight of the oscillating mode."""
    rho = second_eigenvalue(law)
    return abs(np.exp(rho * delta) - math.exp(malthusian_alpha(law) * delta))


def large_k_modulus(c: float) -> float:
    """Limit of :func:`residual_modulus` as ``k -> inf`` with ``delta = c log2 / alpha``."""
    return 2**c * math.sqrt(2 * (1 - math.cos(2 * math.pi * c)))


def yule_mean(nu: float, t):
    return np.exp(nu * np.asarray(t, dtype=float))


def yule_variance(nu: float, t):
    m = yule_mean(nu, t)
    return m * m - m


def yule_residual_variance(nu: float, delta: float) -> float:
    """Per-individual variance ``e^{2 nu delta} - e^{nu delta}`` of exponential residuals."""
    return math.exp(2 * nu * delta) - math.exp(nu * delta)
