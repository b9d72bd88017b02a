from __future__ import annotations

import math

import numpy as np
import pytest

from bhinfer.errors import DomainError, UnsupportedAgeError
from bhinfer.inference import default_window, residual_variance_curve
from bhinfer.lifetime import GammaLifetime
from bhinfer.scenarios import Scenarios
from bhinfer.sigma import (
    SigmaBreakdown,
    SigmaBudgets,
    SigmaEstimate,
    cond_mean_age,
    critical_sigma,
    sigma_breakdown,
    sigma_total,
    sigma_x,
    sigma_y,
)
from bhinfer.sim import SimConfig, moments_from_age, simulate_ensemble
from bhinfer.spectral import LOG2, critical_shape, malthusian_alpha, mean_approx

YULE = GammaLifetime(1.0, 1.0)
SMALL = SigmaBudgets(mc_per_node=4000, mc_zeta=500, age_nodes=8, x_nodes=4)


@pytest.mark.parametrize(
    "kwargs",
    [{"mc_per_node": 1}, {"mc_zeta": 1}, {"age_nodes": 1}, {"x_nodes": 1}, {"tail": 0.0}],
)
def test_budgets_validation(kwargs):
    with pytest.raises(DomainError):
        SigmaBudgets(**kwargs)


def test_budgets_to_dict():
    assert SigmaBudgets(**SMALL.to_dict()) == SMALL


def test_breakdown_total():
    parts = SigmaBreakdown(0.5, SigmaEstimate(1.0, 0.3), SigmaEstimate(2.0, 0.4))
    assert parts.total.value == 3.0
    assert parts.total.stderr == pytest.approx(0.5)
    assert str(parts.total) == "3 +/- 0.5"


def test_cond_mean_age_memoryless():
    assert cond_mean_age(YULE, 5.0, LOG2) == pytest.approx(2.0, rel=1e-6)


def test_cond_mean_age_newborn_matches_mean():
    law = GammaLifetime(3.0, 0.5)
    assert cond_mean_age(law, 0.0, 2.0) == pytest.approx(mean_approx(law, 2.0), rel=1e-5)


def test_cond_mean_age_matches_sampling():
    law = GammaLifetime(20.0, 1.0)
    delta = LOG2 / malthusian_alpha(law)
    n_mc = 100_000
    mean, var = moments_from_age(law, 10.0, delta, n_mc, np.random.default_rng(11))
    assert abs(mean - cond_mean_age(law, 10.0, delta)) < 3 * math.sqrt(var / n_mc)


def test_cond_mean_age_invalid():
    with pytest.raises(DomainError):
        cond_mean_age(YULE, -1.0, 1.0)
    with pytest.raises(DomainError):
        cond_mean_age(YULE, 1.0, 0.0)
    with pytest.raises(UnsupportedAgeError):
        cond_mean_age(GammaLifetime(2.0, 1.0), 1e5, 1.0)


def test_sigma_x_yule(rng):
    est = sigma_x(YULE, LOG2, mc_per_node=4000, age_nodes=8, rng=rng)
    assert est.stderr > 0
    assert abs(est.value - 2.0) < 5 * est.stderr + 0.01


def test_sigma_y_vanishes_for_yule(rng):
    est = sigma_y(YULE, LOG2, mc_zeta=500, x_nodes=4, rng=rng)
    assert est.value == pytest.approx(0.0, abs=1e-8)


def test_sigma_y_positive_for_narrow_lifetimes(rng):
    est = sigma_y(GammaLifetime.from_alpha(10.0, 1.0), LOG2, mc_zeta=500, x_nodes=4, rng=rng)
    assert est.value > 0


def test_sigma_total_yule():
    est = sigma_total(YULE, LOG2, SMALL, np.random.default_rng(1), np.random.default_rng(2))
    assert abs(est.value - 2.0) < 5 * est.stderr + 0.01


def test_sigma_breakdown_reproducible():
    law = GammaLifetime.from_alpha(3.0, 1.0)
    a = sigma_breakdown(law, LOG2, SMALL, np.random.default_rng(1), np.random.default_rng(2))
    b = sigma_breakdown(law, LOG2, SMALL, np.random.default_rng(1), np.random.default_rng(2))
    assert a == b
    assert a.alpha == pytest.approx(1.0)


def test_sigma_x_decreases_with_shape(rng):
    wide = sigma_x(GammaLifetime.from_alpha(2.0, 1.0), LOG2, 4000, 8, rng)
    narrow = sigma_x(GammaLifetime.from_alpha(20.0, 1.0), LOG2, 4000, 8, rng)
    assert narrow.value < wide.value


def test_critical_sigma():
    law = GammaLifetime.from_alpha(critical_shape(), 1.0)
    assert critical_sigma(law, LOG2) > 0
    with pytest.raises(DomainError, match="k_c"):
        critical_sigma(GammaLifetime(30.0, 1.0), LOG2)


@pytest.mark.slow
@pytest.mark.parametrize("k", [5.0, 20.0])
def test_sigma_delta_conventions_consistent(k):
    """A longer observation step accumulates more variance."""
    law = GammaLifetime.from_alpha(k, 1.0)
    budgets = SigmaBudgets(mc_per_node=50_000, mc_zeta=20_000, age_nodes=32)
    full = sigma_total(law, LOG2, budgets, np.random.default_rng(1), np.random.default_rng(2))
    half = sigma_total(law, LOG2 / 2, budgets, np.random.default_rng(3), np.random.default_rng(4))
    assert math.isfinite(full.value)
    assert full.value > half.value > 0


@pytest.mark.slow
@pytest.mark.parametrize("k", [20.0, 35.0, 50.0])
def test_sigma_y_smaller_at_full_doubling(k):
    law = GammaLifetime.from_alpha(k, 1.0)
    full = sigma_y(law, LOG2, mc_zeta=50_000, rng=np.random.default_rng(5))
    half = sigma_y(law, LOG2 / 2, mc_zeta=50_000, rng=np.random.default_rng(5))
    assert 0 <= full.value < half.value


@pytest.mark.slow
@pytest.mark.parametrize("scenario", list(Scenarios.by_category("sigma-check")), ids=str)
def test_sigma_total_matches_ensemble_plateau(scenario):
    """Late-time variance of normalized one-doubling residuals settles at sigma_total."""
    cfg = SimConfig(scenario.grid_step, n_grid=112, seed=3, pop_cap=8000)
    ds = simulate_ensemble(cfg, scenario.law, 2000).to_dataset()
    delta = LOG2 / scenario.alpha
    series = residual_variance_curve(ds, scenario.alpha, delta, normalized=True)
    first, last = default_window(ds)
    late = (series.indices >= first) & (series.indices <= last - 8)
    plateau = series.variances[late].mean()

    budgets = SigmaBudgets(mc_per_node=50_000, mc_zeta=20_000, age_nodes=32)
    rngs = np.random.default_rng(1), np.random.default_rng(2)
    expected = sigma_total(scenario.law, delta, budgets, *rngs)
    assert plateau == pytest.approx(expected.value, rel=scenario.sigma_tol)
