"""Build the limiting-variance grid used by the Gaussian-regime estimator."""

from __future__ import annotations

import argparse
from pathlib import Path

from bhinfer.cli_utils import HelpFormatter, add_common_args, parse_with_config, run_command
from bhinfer.hdf5 import save_grid
from bhinfer.sigma import DeltaConvention, SigmaBudgets, build_grid, grid_shapes


def parse_args(args):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=HelpFormatter)
    parser.add_argument(
        "--mesh", type=float, default=0.05, help="spacing p of the shape grid 1 + p l"
    )
    parser.add_argument(
        "--delta-convention",
        default=DeltaConvention.FULL.value,
        choices=[c.value for c in DeltaConvention],
        help="residual step relative to the growth rate",
    )
    parser.add_argument("--alpha", type=float, default=1.0, help="growth rate the grid is built at")
    parser.add_argument("--seed", type=int, default=0, help="root seed of the node streams")
    parser.add_argument("--mc-per-node", type=int, default=100_000, help="samples per age node")
    parser.add_argument(
        "--mc-zeta", type=int, default=100_000, help="lifetime samples per grid node"
    )
    parser.add_argument("--age-nodes", type=int, default=64, help="quadrature nodes over ages")
    parser.add_argument(
        "--x-nodes", type=int, default=8, help="lineage quadrature nodes per mean lifetime"
    )
    parser.add_argument(
        "--allow-non-monotone",
        action="store_true",
        help="release the grid even if its values are not monotone in k",
    )
    parser.add_argument("--workers", type=int, help="worker processes, default BHINFER_NUM_THREADS")
    parser.add_argument("-o", "--out", type=Path, help="output grid file (.h5)")
    add_common_args(parser)
    args = parse_with_config(parser, args)
    if args.out is None:
        parser.error("--out is required")
    if args.mesh <= 0:
        parser.error(f"--mesh must be > 0, got {args.mesh}")
    return args


def sigma_table(args) -> int:
    budgets = SigmaBudgets(
        mc_per_node=args.mc_per_node,
        mc_zeta=args.mc_zeta,
        age_nodes=args.age_nodes,
        x_nodes=args.x_nodes,
    )
    print(f"Building sigma grid with {len(grid_shapes(args.mesh))} nodes (mesh {args.mesh:g})")
    grid = build_grid(
        args.mesh,
        args.delta_convention,
        budgets,
        seed=args.seed,
        alpha=args.alpha,
        n_workers=args.workers,
        require_monotone=False if args.allow_non_monotone else None,
    )
    save_grid(grid, args.out)
    diag = grid.diagnostics()
    print(
        f"Wrote {args.out}: k in [{grid.k_range[0]:g}, {grid.k_range[1]:g}],"
        f" max relative jump {diag['max_relative_jump']:.1%}, monotone {diag['monotone']}"
    )
    return 0


def main(args=None) -> int:
    return run_command(sigma_table, parse_args, args)


if __name__ == "__main__":
    raise SystemExit(main())
