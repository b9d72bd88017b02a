from __future__ import annotations

import pytest

from bhinfer.commands.selftest import main as selftest_main
from bhinfer.commands.sigma_table import main
from bhinfer.hdf5 import load_grid

TINY = ["--mc-per-node", "2000", "--mc-zeta", "300", "--age-nodes", "6", "--x-nodes", "4"]


@pytest.fixture(scope="module")
def grid_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid") / "grid.h5"
    assert main(["--mesh", "20", "--seed", "1", *TINY, "-o", str(out)]) == 0
    return out


def test_sigma_table(grid_file):
    grid = load_grid(grid_file)
    assert grid.k_values.tolist() == [1.0, 21.0]
    assert grid.seed == 1
    assert grid.budgets.mc_per_node == 2000
    assert grid.sigma2[0] > grid.sigma2[1]


def test_selftest_grid_check(grid_file, capsys):
    assert selftest_main(["--only", "grid-file", "--grid-file", str(grid_file)]) == 0
    assert "PASS grid-file" in capsys.readouterr().out


def test_sigma_table_bad_mesh(tmp_path):
    with pytest.raises(SystemExit):
        main(["--mesh", "0", "-o", str(tmp_path / "g.h5")])
