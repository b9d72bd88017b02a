from __future__ import annotations

import numpy as np
import pytest

from bhinfer.commands.simulate import main
from bhinfer.dataset import read_dataset


def _run(tmp_path, name, *extra):
    out = tmp_path / name
    args = ["--k", "4", "--theta", "0.5", "--n-grid", "16", "--n-data", "3", "--seed", "2"]
    args += ["-o", str(out)]
    assert main([*args, *extra]) == 0
    return out


def test_simulate(tmp_path):
    out = _run(tmp_path, "ds.csv")
    ds = read_dataset(out)
    assert ds.n_data == 3
    assert ds.n_times == 17
    assert ds.metadata["config.seed"] == "2"
    assert ds.metadata["config.initial"] == "1:0"
    assert ds.metadata["k"] == "4.0"


def test_simulate_reproducible(tmp_path):
    first = _run(tmp_path, "ds.csv").read_bytes()
    assert _run(tmp_path, "ds.csv").read_bytes() == first

    parallel = read_dataset(_run(tmp_path, "parallel.csv", "--workers", "2"))
    np.testing.assert_array_equal(parallel.counts, read_dataset(tmp_path / "ds.csv").counts)


def test_simulate_scenario_and_cap(tmp_path):
    out = tmp_path / "cap.csv"
    args = ["--scenario", "gauss_k14p5", "--n-grid", "200", "--pop-cap", "64", "--n-data", "2"]
    assert main([*args, "--initial", "2:0", "1:3.5", "-o", str(out)]) == 0
    ds = read_dataset(out)
    assert ds.metadata["pop_cap"] == "64"
    assert not ds.valid[:, -1].any()
    assert (ds.counts[:, 0] == 3).all()
    assert ds.metadata["config.initial"] == "2:0 1:3.5"


@pytest.mark.parametrize(
    "args",
    [
        ["--k", "4", "-o", "x.csv"],
        ["--scenario", "osc_k70", "--k", "4", "-o", "x.csv"],
        ["--k", "4", "--theta", "1"],
        ["--k", "4", "--theta", "1", "--initial", "1-0", "-o", "x.csv"],
        ["--k", "4", "--theta", "1", "--initial", "1.5:0", "-o", "x.csv"],
        ["--k", "4", "--theta", "1", "--initial", "2:0:1", "-o", "x.csv"],
    ],
)
def test_simulate_bad_arguments(args):
    with pytest.raises(SystemExit) as excinfo:
        main(args)
    assert excinfo.value.code == 2


def test_simulate_invalid_law(tmp_path, capsys):
    assert main(["--k", "0.5", "--theta", "1", "-o", str(tmp_path / "x.csv")]) == 2
    assert "DomainError" in capsys.readouterr().err
