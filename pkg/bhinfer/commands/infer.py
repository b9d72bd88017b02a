"""Estimate the lifetime law (k, theta) from a dataset of population counts."""

from __future__ import annotations

import argparse
from dataclasses import replace
from pathlib import Path

from bhinfer.cli_utils import (
    ExitCode,
    HelpFormatter,
    add_common_args,
    config_echo,
    parse_with_config,
    run_command,
    valid_path,
)
from bhinfer.dataset import CountMode, read_dataset
from bhinfer.hdf5 import load_grid
from bhinfer.inference import Outcome, PipelineConfig, run_pipeline
from bhinfer.inference.growth import MIN_WINDOW_COUNT
from bhinfer.report import build_report, export_plots, write_report


def parse_args(args):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=HelpFormatter)
    parser.add_argument("--dataset", type=valid_path, help="dataset file")
    parser.add_argument(
        "--grid-file", type=valid_path, help="sigma grid, needed in the Gaussian regime"
    )
    parser.add_argument("-o", "--out", type=Path, help="report file (.yaml)")
    parser.add_argument("--plots", type=Path, help="directory for plot-ready CSV tables")
    parser.add_argument(
        "--window",
        nargs=2,
        type=int,
        metavar=("FIRST", "LAST"),
        help="grid index window of the fits, overrides --window-start-count",
    )
    parser.add_argument(
        "--window-start-count",
        type=float,
        default=MIN_WINDOW_COUNT,
        help="open the fit window once the mean count reaches this value",
    )
    parser.add_argument(
        "--regime-threshold", type=float, default=0.10, help="Gaussian if |2l-a|/a is below"
    )
    parser.add_argument(
        "--count-mode",
        choices=[m.value for m in CountMode],
        help="override the count mode stored in the dataset",
    )
    parser.add_argument(
        "--k-max", type=float, default=1e4, help="upper end of the oscillating solve"
    )
    target = parser.add_mutually_exclusive_group()
    target.add_argument(
        "--normalized-target",
        dest="normalized",
        action="store_true",
        default=True,
        help="divide residuals by sqrt(N_t) in the Gaussian target",
    )
    target.add_argument(
        "--unnormalized-target",
        dest="normalized",
        action="store_false",
        help="use raw residuals in the Gaussian target, for comparison only",
    )
    add_common_args(parser)
    args = parse_with_config(parser, args)
    if args.dataset is None:
        parser.error("--dataset is required")
    if args.out is None:
        parser.error("--out is required")
    return args


def infer(args) -> int:
    ds = read_dataset(args.dataset)
    if args.count_mode:
        ds = replace(ds, count_mode=CountMode(args.count_mode), valid=ds.valid)
    grid = load_grid(args.grid_file) if args.grid_file else None
    config = PipelineConfig(
        window=tuple(args.window) if args.window else None,
        min_count=args.window_start_count,
        regime_threshold=args.regime_threshold,
        normalized=args.normalized,
        k_max=args.k_max,
    )
    result = run_pipeline(ds, grid, config)
    write_report(build_report(result, config_echo(args)), args.out)
    if args.plots:
        export_plots(ds, result, args.plots)

    print(f"alpha_hat = {result.alpha.alpha_hat:.6g}, lambda_hat = {result.lam.lambda_hat:.6g}")
    print(f"regime: {result.decision.regime} (ratio {result.decision.ratio:.1%})")
    for warning in result.warnings:
        print(f"warning: {warning}")
    if result.outcome != Outcome.ESTIMATED:
        print(f"no estimate: {result.outcome}")
        return ExitCode.INPUT
    est = result.estimate
    print(f"k_hat = {est.k_hat:.6g}, theta_hat = {est.theta_hat:.6g}")
    print(f"mu_hat = {est.mu_hat:.6g} {ds.units}, cv_hat = {est.cv_hat:.4%}")
    return ExitCode.OK


def main(args=None) -> int:
    return run_command(infer, parse_args, args)


if __name__ == "__main__":
    raise SystemExit(main())
