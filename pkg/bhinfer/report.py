"""Serialisation of pipeline results: the YAML report and plot-ready CSV tables."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

import numpy as np
import yaml

from bhinfer.dataset import Dataset
from bhinfer.inference.fluctuations import residuals
from bhinfer.inference.pipeline import PipelineResult
from bhinfer.lifetime import GammaLifetime
from bhinfer.spectral import (
    Regime,
    large_k_modulus,
    residual_modulus,
    spectral_data,
    var_ratio_q_derivative,
)

__all__ = ["REPORT_SCHEMA_VERSION", "build_report", "export_plots", "write_report"]

REPORT_SCHEMA_VERSION = 1


def _plain(value):
    """Convert numpy scalars, arrays and enums into YAML-safe builtins."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _series(series) -> dict | None:
    if series is None:
        return None
    return {
        "delta": series.delta,
        "normalized": series.normalized,
        "times": series.times,
        "variances": series.variances,
        "n_used": series.n_used,
    }


def build_report(result: PipelineResult, config: dict) -> dict:
    a_hat = result.alpha.alpha_hat
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": config,
        "alpha": {
            "alpha_hat": a_hat,
            "mean_r2": result.alpha.mean_r2,
            "window": result.alpha.window,
            "per_trajectory_slopes": result.alpha.per_trajectory_slopes,
        },
        "delta1": result.delta1,
        "delta2": result.delta2,
        "growth_factor": {
            "delta1": math.exp(a_hat * result.delta1),
            "delta2": None if result.delta2 is None else math.exp(a_hat * result.delta2),
        },
        "lambda": {
            "lambda_hat": result.lam.lambda_hat,
            "r2": result.lam.r2,
            "window": result.lam.window,
        },
        "regime": {
            "ratio": result.decision.ratio,
            "threshold": result.decision.threshold,
            "regime": result.decision.regime,
        },
        "outcome": result.outcome,
        "estimate": None,
        "curves": {"half_step": _series(result.series1), "full_step": _series(result.series2)},
        "warnings": result.warnings,
    }
    if (est := result.estimate) is not None:
        report["estimate"] = {
            "k_hat": est.k_hat,
            "theta_hat": est.theta_hat,
            "mu_hat": est.mu_hat,
            "cv_hat": est.cv_hat,
            "regime_used": est.regime_used,
            "diagnostics": dict(est.diagnostics),
        }
        law = GammaLifetime(est.k_hat, est.theta_hat)
        diagnostics = report["estimate"]["diagnostics"]
        diagnostics["spectral_gap"] = spectral_data(law).spectral_gap
        if est.regime_used == Regime.OSCILLATING:
            c = result.delta1 * a_hat / math.log(2)
            diagnostics["residual_modulus"] = residual_modulus(law, result.delta1)
            diagnostics["large_k_modulus"] = large_k_modulus(c)
        else:
            diagnostics["q_slope"] = var_ratio_q_derivative(est.cv_hat)
    return _plain(report)


def write_report(report: dict, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.dump(report, f, sort_keys=False)
    return path


def export_plots(ds: Dataset, result: PipelineResult, out_dir: Path | str) -> list[Path]:
    """Write the tables behind the count, residual and variance plots.

    ``log_counts.csv`` has one row per grid time and one column per trajectory,
    ``residuals.csv`` the same layout for the half-step residuals, and
    ``variance_curve.csv`` the half log-variance with its fitted line.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    with np.errstate(divide="ignore", invalid="ignore"):
        log_counts = np.where(ds.valid, np.log(np.where(ds.valid, ds.counts, 1.0)), np.nan)
    header = "time," + ",".join(f"traj_{j}" for j in range(ds.n_data))
    path = out_dir / "log_counts.csv"
    np.savetxt(path, np.column_stack([ds.times, log_counts.T]), delimiter=",", header=header)
    written.append(path)

    resid, _ = residuals(ds, result.alpha.alpha_hat, result.delta1)
    path = out_dir / "residuals.csv"
    times = ds.times[: resid.shape[1]]
    np.savetxt(path, np.column_stack([times, resid.T]), delimiter=",", header=header)
    written.append(path)

    series = result.series1
    with np.errstate(divide="ignore"):
        half_log = 0.5 * np.log(series.variances)
    fitted = result.lam.intercept + result.lam.lambda_hat * series.times
    path = out_dir / "variance_curve.csv"
    np.savetxt(
        path,
        np.column_stack([series.times, series.variances, half_log, fitted]),
        delimiter=",",
        header="time,variance,half_log_variance,fitted",
    )
    written.append(path)
    return written
