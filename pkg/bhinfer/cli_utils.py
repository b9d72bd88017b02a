from __future__ import annotations

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path

import yaml

from bhinfer.errors import (
    BHError,
    DomainError,
    ExtrapolationError,
    GridBuildError,
    GridFileError,
    GridRequiredError,
    InsufficientDataError,
    NumericConsistencyError,
    PipelineError,
    PopulationLimitError,
    ProportionalCountsError,
    RegimeMismatchError,
    ReplicateError,
)

INPUT_ERRORS = (
    DomainError,
    InsufficientDataError,
    RegimeMismatchError,
    ProportionalCountsError,
    ExtrapolationError,
    GridRequiredError,
)
NUMERIC_ERRORS = (NumericConsistencyError, PopulationLimitError, GridBuildError)


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    INPUT = 2
    NUMERIC = 3
    IO = 4


def valid_path(string):
    if (path := Path(string)).is_file():
        return path
    raise FileNotFoundError(string)


class HelpFormatter(argparse.RawTextHelpFormatter, argparse.ArgumentDefaultsHelpFormatter): ...


def exit_code(error: BaseException) -> ExitCode:
    """Exit code for an exception escaping a command."""
    while isinstance(error, (PipelineError, ReplicateError)):
        error = error.cause
    if isinstance(error, (GridFileError, OSError)):
        return ExitCode.IO
    if isinstance(error, NUMERIC_ERRORS):
        return ExitCode.NUMERIC
    if isinstance(error, (*INPUT_ERRORS, ValueError)):
        return ExitCode.INPUT
    return ExitCode.NUMERIC


def add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=valid_path,
        help="YAML file of option defaults, keys are option names; flags override it",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity",
    )


def parse_with_config(parser: argparse.ArgumentParser, args=None) -> argparse.Namespace:
    """Parse ``args`` with defaults taken from the ``--config`` file, if given."""
    pre, _ = parser.parse_known_args(args)
    if getattr(pre, "config", None):
        with open(pre.config) as f:
            values = yaml.safe_load(f) or {}
        if not isinstance(values, dict):
            parser.error(f"config file {pre.config} must hold a mapping")
        values = {str(k).replace("-", "_"): v for k, v in values.items()}
        known = {action.dest for action in parser._actions}
        if unknown := sorted(set(values) - known - {"config"}):
            parser.error(f"unknown keys in config file {pre.config}: {unknown}")
        parser.set_defaults(**values)
    parsed = parser.parse_args(args)
    logging.basicConfig(level=parsed.log_level, format="%(levelname)s %(name)s: %(message)s")
    return parsed


def config_echo(args: argparse.Namespace) -> dict:
    """Resolved options as YAML-safe values, excluding the config path itself."""
    echo = {}
    for key, value in vars(args).items():
        if key in {"config", "log_level"}:
            continue
        if isinstance(value, Path):
            value = str(value)
        elif isinstance(value, tuple):
            value = list(value)
        echo[key] = value
    return echo


def run_command(func, parse, args=None) -> int:
    """Run ``func(parse(args))``, reporting failures on stderr and mapping them to exit codes.

    Usage errors still exit through argparse.
    """
    try:
        return int(func(parse(args)))
    except (BHError, OSError, ValueError) as e:
        code = exit_code(e)
        stage = f"[{e.stage}] " if isinstance(e, PipelineError) else ""
        cause = e.cause if isinstance(e, PipelineError) else e
        print(f"error: {stage}{type(cause).__name__}: {cause}", file=sys.stderr)
        return code
