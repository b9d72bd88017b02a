from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from bhinfer.dataset import CountMode
from bhinfer.errors import DomainError, PopulationLimitError, ReplicateError
from bhinfer.lifetime import GammaLifetime
from bhinfer.sim import SimConfig, simulate_ensemble, simulate_trajectory
from bhinfer.spectral import (
    LOG2,
    malthusian_alpha,
    mean_approx,
    stationary_age_density,
    yule_mean,
    yule_variance,
)

YULE = GammaLifetime(1.0, 1.0)


@pytest.fixture
def cfg():
    return SimConfig(grid_step=0.25, n_grid=12, seed=5)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"grid_step": 0.0, "n_grid": 10},
        {"grid_step": 1.0, "n_grid": 1},
        {"grid_step": 1.0, "n_grid": 10, "pop_cap": 1},
        {"grid_step": 1.0, "n_grid": 10, "initial": ((0, 0.0),)},
        {"grid_step": 1.0, "n_grid": 10, "initial": ((1, -1.0),)},
        {"grid_step": 1.0, "n_grid": 10, "initial": ((1.5, 0.0),)},
        {"grid_step": 1.0, "n_grid": 10, "initial": ((float("nan"), 0.0),)},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        SimConfig(**kwargs)


def test_config_times(cfg):
    assert len(cfg.times) == 13
    assert cfg.horizon == 3.0
    assert cfg.initial_count == 1


def test_trajectory_deterministic(cfg):
    a = simulate_trajectory(cfg, YULE, 3)
    b = simulate_trajectory(cfg, YULE, 3)
    np.testing.assert_array_equal(a.counts, b.counts)


def test_trajectory_counts_monotone(cfg):
    tr = simulate_trajectory(cfg, GammaLifetime(10.0, 0.1), 0)
    assert tr.counts[0] == 1
    assert np.all(np.diff(tr.counts) >= 0)
    assert tr.truncated_at is None
    assert tr.valid.all()


def test_initial_population():
    cfg = SimConfig(grid_step=0.1, n_grid=4, initial=((3, 0.0), (2, 1.5)))
    tr = simulate_trajectory(cfg, GammaLifetime(50.0, 1.0), 0)
    assert tr.counts[0] == 5


def test_record_ages(cfg):
    tr = simulate_trajectory(cfg, YULE, 0, record_ages=True)
    assert len(tr.ages) == tr.counts[-1]
    assert np.all(tr.ages >= 0)
    assert np.all(tr.ages <= cfg.horizon)


def test_pop_cap_masks_tail():
    cfg = SimConfig(grid_step=0.5, n_grid=20, seed=1, pop_cap=16)
    ens = simulate_ensemble(cfg, YULE, n_data=5, n_workers=1)
    for tr in ens.trajectories:
        assert tr.truncated_at is not None
        assert np.all(tr.counts[tr.valid] < 16)
        assert np.all(tr.counts[~tr.valid] == 0)
    ds = ens.to_dataset()
    assert ds.metadata["pop_cap"] == "16"
    assert np.isnan(ds.counts[~ds.valid]).all()


def test_safety_cap():
    cfg = SimConfig(grid_step=1.0, n_grid=20, safety_cap=50)
    with pytest.raises(PopulationLimitError):
        simulate_trajectory(cfg, YULE)
    with pytest.raises(ReplicateError) as excinfo:
        simulate_ensemble(cfg, YULE, n_data=2, n_workers=1)
    assert excinfo.value.index == 0


def test_ensemble_independent_of_workers(cfg):
    serial = simulate_ensemble(cfg, YULE, n_data=6, n_workers=1)
    parallel = simulate_ensemble(cfg, YULE, n_data=6, n_workers=2)
    np.testing.assert_array_equal(serial.counts, parallel.counts)


def test_ensemble_prefix_stable(cfg):
    small = simulate_ensemble(cfg, YULE, n_data=2, n_workers=1)
    large = simulate_ensemble(cfg, YULE, n_data=4, n_workers=1)
    np.testing.assert_array_equal(small.counts, large.counts[:2])


def test_ensemble_to_dataset(cfg):
    ens = simulate_ensemble(cfg, YULE, n_data=3, n_workers=1)
    ds = ens.to_dataset(units="hours")
    assert len(ens) == 3
    assert ds.count_mode == CountMode.ABSOLUTE
    assert ds.units == "hours"
    assert ds.metadata == {"seed": "5", "k": "1.0", "theta": "1.0"}
    assert ds.grid_step == cfg.grid_step


def test_yule_mean_growth():
    cfg = SimConfig(grid_step=0.5, n_grid=6, seed=11)
    ens = simulate_ensemble(cfg, YULE, n_data=10_000, n_workers=1)
    mean = ens.counts[:, -1].mean()
    std_error = math.sqrt(yule_variance(1.0, 3.0) / 10_000)
    assert abs(mean - yule_mean(1.0, 3.0)) < 5 * std_error


def test_single_replicate_ensemble(cfg):
    ens = simulate_ensemble(cfg, YULE, n_data=1, n_workers=1)
    np.testing.assert_array_equal(ens.counts[0], simulate_trajectory(cfg, YULE, 0).counts)


@pytest.mark.slow
def test_mean_matches_mean_formula():
    law = GammaLifetime(35.0, 1.0)
    cfg = SimConfig(grid_step=LOG2 / (8 * malthusian_alpha(law)), n_grid=64, seed=3)
    counts = simulate_ensemble(cfg, law, n_data=10_000).counts
    expected = mean_approx(law, cfg.times)
    usable = expected >= 10
    np.testing.assert_allclose(counts.mean(axis=0)[usable], expected[usable], rtol=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("k", [1.0, 35.0, 70.0])
def test_mean_growth_law(k):
    law = GammaLifetime(k, 1.0)
    alpha = malthusian_alpha(law)
    cfg = SimConfig(grid_step=LOG2 / (8 * alpha), n_grid=112, seed=4, pop_cap=8000)
    ds = simulate_ensemble(cfg, law, n_data=2000).to_dataset()
    observed = ds.valid.all(axis=0)
    mean = ds.mean_counts()
    window = observed & (mean >= 50) & (mean <= cfg.pop_cap / 2)
    assert window.sum() >= 8
    fit = stats.linregress(ds.times[window], np.log(mean[window]))
    assert fit.slope == pytest.approx(alpha, rel=0.02)


@pytest.mark.slow
def test_age_profile_is_stationary():
    law = GammaLifetime(4.0, 1.0)
    cfg = SimConfig(grid_step=1.0, n_grid=200, seed=8, pop_cap=20_000)
    ages = simulate_trajectory(cfg, law, record_ages=True).ages
    edges = np.quantile(ages, np.linspace(0, 1, 10, endpoint=False))
    edges[0] = 0.0
    bounds = np.append(edges, np.inf)
    expected = [
        integrate.quad(lambda a: stationary_age_density(law, a), lo, hi)[0]
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    observed = np.histogram(ages, np.append(edges, ages.max() + 1))[0] / len(ages)
    assert 0.5 * np.abs(observed - expected).sum() < 0.05
