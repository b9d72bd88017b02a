"""Simulate an ensemble of Bellman-Harris trajectories and write it as a dataset file."""

from __future__ import annotations

import argparse
from pathlib import Path

from bhinfer.cli_utils import (
    HelpFormatter,
    add_common_args,
    config_echo,
    parse_with_config,
    run_command,
)
from bhinfer.dataset import write_dataset
from bhinfer.lifetime import GammaLifetime
from bhinfer.scenarios import Scenarios
from bhinfer.sim import SimConfig, simulate_ensemble
from bhinfer.spectral import LOG2, malthusian_alpha


def parse_args(args):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=HelpFormatter)
    parser.add_argument("--k", type=float, help="Gamma shape of the lifetime")
    parser.add_argument("--theta", type=float, help="Gamma scale of the lifetime")
    parser.add_argument(
        "--scenario",
        choices=[s.name for s in Scenarios],
        help="take k and theta from a reference scenario",
    )
    parser.add_argument("--seed", type=int, default=0, help="root seed of the replicate streams")
    parser.add_argument(
        "--delta-step",
        type=float,
        help="observation grid step, defaults to log2/(8 alpha)",
    )
    parser.add_argument("--n-grid", type=int, default=120, help="index of the last grid point")
    parser.add_argument("--pop-cap", type=int, help="stop each trajectory at this population")
    parser.add_argument("--n-data", type=int, default=1, help="number of replicates")
    parser.add_argument(
        "--initial",
        nargs="+",
        default=["1:0"],
        help="founding population as COUNT:AGE pairs",
    )
    parser.add_argument("--units", default="time", help="time unit label written to the file")
    parser.add_argument("--workers", type=int, help="worker processes, default BHINFER_NUM_THREADS")
    parser.add_argument("-o", "--out", type=Path, help="output dataset file")
    add_common_args(parser)
    args = parse_with_config(parser, args)

    if args.scenario:
        if args.k is not None or args.theta is not None:
            parser.error("--scenario cannot be combined with --k/--theta")
        args.k, args.theta = Scenarios[args.scenario].k, Scenarios[args.scenario].theta
    if args.k is None or args.theta is None:
        parser.error("either --scenario or both --k and --theta are required")
    if args.out is None:
        parser.error("--out is required")
    try:
        args.initial = [_founders(str(pair)) for pair in args.initial]
    except ValueError:
        parser.error(f"--initial expects COUNT:AGE pairs with an integer COUNT, got {args.initial}")
    return args


def _founders(pair: str) -> tuple[int, float]:
    count, age = pair.split(":")
    return int(count), float(age)


def simulate(args) -> int:
    law = GammaLifetime(args.k, args.theta)
    if args.delta_step is None:
        args.delta_step = LOG2 / (8 * malthusian_alpha(law))
    cfg = SimConfig(
        grid_step=args.delta_step,
        n_grid=args.n_grid,
        seed=args.seed,
        pop_cap=args.pop_cap,
        initial=tuple(args.initial),
    )
    print(f"Simulating {args.n_data} replicates of {law} on {cfg.n_grid + 1} grid points")
    ensemble = simulate_ensemble(cfg, law, args.n_data, args.workers)
    ds = ensemble.to_dataset(units=args.units)
    echo = config_echo(args)
    echo["initial"] = " ".join(f"{c}:{a:g}" for c, a in args.initial)
    ds.metadata.update({f"config.{key}": str(value) for key, value in echo.items()})
    write_dataset(ds, args.out)
    n_cap = sum(tr.truncated_at is not None for tr in ensemble.trajectories)
    print(f"Wrote {args.out} ({n_cap} trajectories reached the population cap)")
    return 0


def main(args=None) -> int:
    return run_command(simulate, parse_args, args)


if __name__ == "__main__":
    raise SystemExit(main())
