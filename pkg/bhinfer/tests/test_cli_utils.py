from __future__ import annotations

import argparse
from pathlib import Path

import pytest

from bhinfer.cli_utils import (
    ExitCode,
    add_common_args,
    config_echo,
    exit_code,
    parse_with_config,
    run_command,
    valid_path,
)
from bhinfer.errors import (
    DatasetError,
    DomainError,
    GridCorruptionError,
    NumericConsistencyError,
    PipelineError,
    PopulationLimitError,
    ReplicateError,
)


def test_valid_path(tmp_path):
    path = tmp_path / "file.txt"
    path.write_text("x")
    assert valid_path(str(path)) == path
    with pytest.raises(FileNotFoundError):
        valid_path(str(tmp_path / "missing.txt"))


@pytest.mark.parametrize(
    ("error", "code"),
    [
        (DomainError("x"), ExitCode.INPUT),
        (DatasetError("x"), ExitCode.INPUT),
        (NumericConsistencyError("x"), ExitCode.NUMERIC),
        (GridCorruptionError("x"), ExitCode.IO),
        (FileNotFoundError("x"), ExitCode.IO),
        (PipelineError("lambda", DomainError("x")), ExitCode.INPUT),
        (ReplicateError(2, PopulationLimitError("x")), ExitCode.NUMERIC),
    ],
)
def test_exit_code(error, code):
    assert exit_code(error) == code


def _parser():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-data", type=int, default=1)
    add_common_args(parser)
    return parser


def test_parse_with_config(tmp_path):
    config = tmp_path / "opts.yaml"
    config.write_text("seed: 7\nn-data: 4\n")
    args = parse_with_config(_parser(), ["--config", str(config), "--seed", "9"])
    assert args.seed == 9
    assert args.n_data == 4
    assert args.log_level == "WARNING"


@pytest.mark.parametrize("text", ["unknown_option: 1\n", "- 1\n- 2\n"])
def test_parse_with_bad_config(tmp_path, text):
    config = tmp_path / "opts.yaml"
    config.write_text(text)
    with pytest.raises(SystemExit) as excinfo:
        parse_with_config(_parser(), ["--config", str(config)])
    assert excinfo.value.code == 2


def test_config_echo():
    args = argparse.Namespace(config=Path("a.yaml"), log_level="INFO", out=Path("b"), window=(1, 2))
    assert config_echo(args) == {"out": "b", "window": [1, 2]}


def test_run_command(capsys):
    def failing(args):
        raise PipelineError("alpha", DomainError("bad counts"))

    assert run_command(failing, lambda args: args, []) == ExitCode.INPUT
    assert "error: [alpha] DomainError: bad counts" in capsys.readouterr().err
    assert run_command(lambda args: 0, lambda args: args) == ExitCode.OK


def test_run_command_parse_io_error(tmp_path, capsys):
    def parse(args):
        return valid_path(str(tmp_path / "missing.csv"))

    assert run_command(lambda args: 0, parse) == ExitCode.IO
    assert "FileNotFoundError" in capsys.readouterr().err
