"""Run the fast invariant checks of the package and report pass/fail per check."""

from __future__ import annotations

import argparse
import math
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy import integrate

from bhinfer.cli_utils import (
    ExitCode,
    HelpFormatter,
    add_common_args,
    parse_with_config,
    run_command,
)
from bhinfer.dataset import read_dataset
from bhinfer.errors import BHError
from bhinfer.hdf5 import load_grid
from bhinfer.inference import infer_oscillating
from bhinfer.inference.fluctuations import residuals
from bhinfer.lifetime import GammaLifetime, laplace
from bhinfer.mock import get_mock_dataset
from bhinfer.sim import SimConfig, simulate_ensemble
from bhinfer.spectral import (
    critical_shape,
    eigenvalue_set,
    malthusian_alpha,
    mean_approx,
    second_eigenvalue,
    stationary_age_density,
    var_ratio_q,
    yule_mean,
    yule_residual_variance,
    yule_variance,
)

SHAPES = (1, 2, 4, 35, 70, 200.5)


class CheckFailed(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


def check_laplace_identities(args) -> str:
    worst_alpha, worst_root = 0.0, 0.0
    for k in SHAPES:
        law = GammaLifetime(k, 1.0)
        worst_alpha = max(worst_alpha, abs(laplace(law, malthusian_alpha(law)) - 0.5))
        worst_root = max(worst_root, *(abs(laplace(law, rho) - 0.5) for rho in eigenvalue_set(law)))
    _expect(worst_alpha < 1e-12, f"|L(alpha) - 1/2| = {worst_alpha:.3g}")
    _expect(worst_root < 1e-10, f"|L(rho) - 1/2| = {worst_root:.3g}")
    return f"max residues {worst_alpha:.1e} / {worst_root:.1e}"


def check_critical_shape(args) -> str:
    k_c = critical_shape()
    _expect(abs(k_c - 57.24) < 0.01, f"k_c = {k_c}")
    _expect(abs(1 / math.sqrt(k_c) - 0.1322) < 5e-4, f"cv_c = {1 / math.sqrt(k_c)}")
    return f"k_c = {k_c:.4f}"


def check_mean_formula(args) -> str:
    for k in range(1, 11):
        value = mean_approx(GammaLifetime(k, 1.0), 0.0)
        _expect(abs(value - 1) < 1e-9, f"k={k}: mean_approx(0) = {value}")
    t = np.linspace(0, 10, 21)
    rel = np.abs(mean_approx(GammaLifetime(1, 1.0), t) / np.exp(t) - 1).max()
    _expect(rel < 1e-12, f"exponential mean off by {rel:.3g}")
    return "exact at t=0 and for k=1"


def check_age_density(args) -> str:
    law = GammaLifetime(35, 1.0)
    total, _ = integrate.quad(lambda a: stationary_age_density(law, a), 0, 400, limit=200)
    _expect(abs(total - 1) < 1e-6, f"mass {total}")
    return f"mass {total:.9f}"


def check_variance_ratio(args) -> str:
    _expect(var_ratio_q(Fraction(1)) == 1, "q(1) != 1")
    _expect(var_ratio_q(0.05) < var_ratio_q(0.1), "q not increasing")
    return "q(1) = 1"


def check_round_trip(args) -> str:
    law = GammaLifetime(70, 1.0)
    rho = second_eigenvalue(law)
    est = infer_oscillating(malthusian_alpha(law), rho.real)
    _expect(abs(est.k_hat - 70) < 1e-6, f"k_hat = {est.k_hat}")
    _expect(abs(est.theta_hat - 1) < 1e-8, f"theta_hat = {est.theta_hat}")
    return f"k_hat = {est.k_hat:.9f}"


def check_dataset_io(args) -> str:
    with tempfile.TemporaryDirectory() as tmp:
        path, ds = get_mock_dataset("oscillating", Path(tmp) / "mock.csv", n_data=4, doublings=3)
        _expect(read_dataset(path) == ds, "dataset round trip differs")
    return "round trip exact"


def check_exponential_oracle(args) -> str:
    law = GammaLifetime(1, 1.0)
    delta = math.log(2)
    cfg = SimConfig(grid_step=delta / 2, n_grid=20, seed=args.seed)
    ds = simulate_ensemble(cfg, law, args.n_oracle).to_dataset()
    final = ds.counts[:, -1]
    t_end = cfg.times[-1]
    mean_ratio = final.mean() / yule_mean(1.0, t_end)
    var_ratio = final.var() / yule_variance(1.0, t_end)
    _expect(abs(mean_ratio - 1) < 0.08, f"E[N] off by a factor {mean_ratio:.4f}")
    _expect(abs(var_ratio - 1) < 0.25, f"Var(N) off by a factor {var_ratio:.4f}")
    resid, _ = residuals(ds, malthusian_alpha(law), delta)
    late = slice(resid.shape[1] - 4, resid.shape[1])
    ratio = float(np.mean(resid[:, late].var(axis=0) / ds.counts[:, late].mean(axis=0)))
    expected = yule_residual_variance(1.0, delta)
    _expect(abs(ratio / expected - 1) < 0.10, f"Var(R)/E[N] = {ratio:.4f}, expected {expected}")
    return f"Var(R)/E[N] = {ratio:.4f}"


def check_grid(args) -> str:
    _expect(args.grid_file is not None, "no --grid-file given")
    grid = load_grid(args.grid_file)
    _expect(np.all(grid.sigma2 > 0), "non-positive grid values")
    _expect(grid.is_monotone(), "grid values are not monotone")
    return f"{len(grid)} nodes, max jump {grid.max_relative_jump():.1%}"


CHECKS = {
    "laplace-identities": check_laplace_identities,
    "critical-shape": check_critical_shape,
    "mean-formula": check_mean_formula,
    "age-density": check_age_density,
    "variance-ratio": check_variance_ratio,
    "oscillating-round-trip": check_round_trip,
    "dataset-io": check_dataset_io,
    "exponential-oracle": check_exponential_oracle,
    "grid-file": check_grid,
}


def parse_args(args):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=HelpFormatter)
    parser.add_argument("--grid-file", type=Path, help="also check this sigma grid file")
    parser.add_argument("--seed", type=int, default=0, help="seed of the Monte-Carlo checks")
    parser.add_argument(
        "--n-oracle", type=int, default=3000, help="replicates of the exponential oracle"
    )
    parser.add_argument("--only", nargs="+", choices=list(CHECKS), help="run only these checks")
    add_common_args(parser)
    return parse_with_config(parser, args)


def selftest(args) -> int:
    names = args.only or [n for n in CHECKS if n != "grid-file" or args.grid_file]
    failed = []
    for name in names:
        try:
            detail = CHECKS[name](args)
        except (CheckFailed, BHError, OSError, ValueError) as e:
            failed.append(name)
            print(f"FAIL {name}: {type(e).__name__}: {e}")
        else:
            print(f"PASS {name}: {detail}")
    print(f"{len(names) - len(failed)}/{len(names)} checks passed")
    return ExitCode.CHECK_FAILED if failed else ExitCode.OK


def main(args=None) -> int:
    return run_command(selftest, parse_args, args)


if __name__ == "__main__":
    raise SystemExit(main())
