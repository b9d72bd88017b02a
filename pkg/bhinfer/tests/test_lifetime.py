from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from bhinfer.errors import DomainError, PoleError
from bhinfer.lifetime import GammaLifetime, density, laplace, log_survival, survival
from bhinfer.spectral import malthusian_alpha


def test_invalid_parameters():
    with pytest.raises(DomainError):
        GammaLifetime(0.5, 1.0)
    with pytest.raises(DomainError):
        GammaLifetime(2.0, 0.0)
    with pytest.raises(DomainError):
        GammaLifetime(math.nan, 1.0)


def test_moments():
    law = GammaLifetime(35, 1.0)
    assert law.mean() == 35
    assert law.cv() == pytest.approx(0.1690, abs=1e-4)
    assert law.std() == pytest.approx(math.sqrt(35))
    assert str(law) == "Gamma(k=35, theta=1)"


def test_from_mean_cv():
    law = GammaLifetime.from_mean_cv(50.8, 0.1984)
    assert law.mean() == pytest.approx(50.8)
    assert law.cv() == pytest.approx(0.1984)


def test_from_alpha():
    law = GammaLifetime.from_alpha(25.4, 0.02)
    assert malthusian_alpha(law) == pytest.approx(0.02, rel=1e-12)


def test_density_values():
    assert density(GammaLifetime(1, 1.0), 0.0) == pytest.approx(1.0)
    assert density(GammaLifetime(1, 1.0), math.log(2)) == pytest.approx(0.5)
    assert density(GammaLifetime(2, 1.0), 1.0) == pytest.approx(math.exp(-1))


def test_density_normalised():
    law = GammaLifetime(14.5, 3.4)
    total, _ = integrate.quad(lambda t: density(law, t), 0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_density_array():
    values = density(GammaLifetime(2, 1.0), np.array([0.0, 1.0, 2.0]))
    assert isinstance(values, np.ndarray)
    assert values[0] == 0.0


def test_negative_time():
    law = GammaLifetime(2, 1.0)
    with pytest.raises(DomainError):
        density(law, -1.0)
    with pytest.raises(DomainError):
        survival(law, -0.1)


def test_survival():
    assert survival(GammaLifetime(3, 2.0), 0.0) == 1.0
    assert survival(GammaLifetime(1, 1.0), math.log(2)) == pytest.approx(0.5)
    values = survival(GammaLifetime(35, 1.0), np.linspace(0, 100, 201))
    assert np.all(np.diff(values) <= 0)
    assert np.all(values > 0)


def test_log_survival():
    law = GammaLifetime(4, 1.5)
    assert log_survival(law, 3.0) == pytest.approx(math.log(survival(law, 3.0)))


@pytest.mark.parametrize("k", [1, 2, 4, 35, 70, 200.5])
def test_laplace_at_alpha(k):
    law = GammaLifetime(k, 1.0)
    assert abs(laplace(law, malthusian_alpha(law)) - 0.5) < 1e-12


def test_laplace_pole():
    law = GammaLifetime(3, 2.0)
    with pytest.raises(PoleError):
        laplace(law, -0.5)


@pytest.mark.parametrize("theta", [0.0129, 0.26, 0.1, 1 / 3, 7.3])
def test_laplace_pole_non_dyadic_scale(theta):
    law = GammaLifetime(120.1, theta)
    with pytest.raises(PoleError):
        laplace(law, -1 / theta)
    with pytest.raises(PoleError):
        laplace(law, np.array([0.0, -1 / theta]))
    assert abs(laplace(law, -0.5 / theta)) == pytest.approx(2**120.1)


def test_laplace_conjugate_symmetry(rng):
    law = GammaLifetime(7.3, 0.8)
    rho = rng.normal(size=100) + 1j * rng.normal(size=100)
    assert np.allclose(laplace(law, np.conj(rho)), np.conj(laplace(law, rho)), rtol=1e-12)
