from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
import yaml

from bhinfer.inference import ParamEstimate, run_pipeline
from bhinfer.lifetime import GammaLifetime
from bhinfer.mock import mock_oscillating
from bhinfer.report import REPORT_SCHEMA_VERSION, build_report, export_plots, write_report
from bhinfer.spectral import Regime, spectral_data, var_ratio_q_derivative


@pytest.fixture(scope="module")
def run():
    ds = mock_oscillating(doublings=12)
    return ds, run_pipeline(ds)


def test_build_report(run):
    _, result = run
    report = build_report(result, {"dataset": "mock.csv", "window": None})
    assert report["schema_version"] == REPORT_SCHEMA_VERSION
    assert report["config"]["dataset"] == "mock.csv"
    assert report["outcome"] == "estimated"
    assert report["regime"]["regime"] == "oscillating"
    assert report["delta2"] is None
    assert report["curves"]["full_step"] is None
    assert isinstance(report["alpha"]["window"], list)
    assert report["growth_factor"]["delta1"] == pytest.approx(np.sqrt(2), rel=1e-3)
    est = report["estimate"]
    assert est["k_hat"] == pytest.approx(70, abs=0.5)
    assert est["regime_used"] == "oscillating"
    assert est["diagnostics"]["residual_modulus"] > 0
    assert "residual_modulus" not in result.estimate.diagnostics
    gap = spectral_data(GammaLifetime(est["k_hat"], est["theta_hat"])).spectral_gap
    assert est["diagnostics"]["spectral_gap"] == pytest.approx(gap)
    assert 0 < gap < result.alpha.alpha_hat
    assert "q_slope" not in est["diagnostics"]


def test_gaussian_report_diagnostics(run):
    _, result = run
    alpha_hat = result.alpha.alpha_hat
    estimate = ParamEstimate.from_shape(35.0, alpha_hat, Regime.GAUSSIAN, sigma2_bar=1.2)
    report = build_report(replace(result, estimate=estimate), {})
    diagnostics = report["estimate"]["diagnostics"]
    assert diagnostics["sigma2_bar"] == 1.2
    assert diagnostics["q_slope"] == pytest.approx(var_ratio_q_derivative(35**-0.5))
    assert diagnostics["q_slope"] > 0
    assert diagnostics["spectral_gap"] > 0
    assert "residual_modulus" not in diagnostics


def test_write_report(tmp_path, run):
    _, result = run
    report = build_report(result, {})
    path = write_report(report, tmp_path / "out" / "report.yaml")
    with open(path) as f:
        assert yaml.safe_load(f) == report
    assert path.read_text().startswith("schema_version: 1\n")


def test_export_plots(tmp_path, run):
    ds, result = run
    paths = export_plots(ds, result, tmp_path / "plots")
    assert [p.name for p in paths] == ["log_counts.csv", "residuals.csv", "variance_curve.csv"]
    log_counts = np.loadtxt(paths[0], delimiter=",")
    assert log_counts.shape == (ds.n_times, ds.n_data + 1)
    np.testing.assert_allclose(log_counts[:, 1:], np.log(ds.counts.T))
    curve = np.loadtxt(paths[2], delimiter=",")
    assert curve.shape == (len(result.series1), 4)
    np.testing.assert_allclose(curve[:, 2], curve[:, 3], atol=1e-6)
