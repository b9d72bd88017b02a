"""HDF5 storage of a :class:`~bhinfer.sigma.grid.SigmaGrid`."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import h5py
import numpy as np

import bhinfer
from bhinfer.errors import GridCorruptionError, GridVersionError
from bhinfer.sigma.grid import SigmaGrid
from bhinfer.sigma.integrals import SigmaBudgets

__all__ = ["GRID_FORMAT_VERSION", "load_grid", "save_grid"]

GRID_FORMAT_VERSION = 1
ARRAYS = ("k_values", "sigma2", "sigma2_x", "sigma2_y", "stderr", "stderr_x", "stderr_y")


def _header(grid: SigmaGrid) -> dict:
    return {
        "mesh": float(grid.mesh),
        "delta_convention": grid.delta_convention.value,
        "alpha": float(grid.alpha),
        "seed": int(grid.seed),
        "budgets": grid.budgets.to_dict(),
    }


def _checksum(arrays: dict[str, np.ndarray], header: dict) -> str:
    digest = hashlib.sha256()
    digest.update(json.dumps(header, sort_keys=True).encode())
    for name in ARRAYS:
        digest.update(name.encode())
        digest.update(np.ascontiguousarray(arrays[name], dtype="<f8").tobytes())
    return digest.hexdigest()


def save_grid(grid: SigmaGrid, path: Path | str) -> Path:
    """Write ``grid`` with a version tag, provenance metadata and a checksum."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _header(grid)
    arrays = {name: getattr(grid, name) for name in ARRAYS}
    with h5py.File(path, "w") as f:
        for name, values in arrays.items():
            f.create_dataset(name, data=np.asarray(values, dtype="<f8"))
        f.attrs.create("format_version", GRID_FORMAT_VERSION)
        f.attrs.create("writer_version", bhinfer.__version__)
        f.attrs.create("header", json.dumps(header, sort_keys=True))
        f.attrs.create("diagnostics", json.dumps(grid.diagnostics(), sort_keys=True))
        f.attrs.create("checksum", _checksum(arrays, header))
    return path


def load_grid(path: Path | str) -> SigmaGrid:
    """Read a grid written by :func:`save_grid`.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    GridVersionError
        If the file was written with another format version.
    GridCorruptionError
        If the file cannot be parsed or its checksum does not match.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Grid file {path} does not exist")
    try:
        with h5py.File(path, "r") as f:
            version = int(f.attrs["format_version"])
            if version != GRID_FORMAT_VERSION:
                raise GridVersionError(
                    f"{path} has grid format version {version}, expected {GRID_FORMAT_VERSION}"
                )
            header = json.loads(f.attrs["header"])
            stored = f.attrs["checksum"]
            arrays = {name: f[name][:] for name in ARRAYS}
    except GridVersionError:
        raise
    except (OSError, KeyError, ValueError) as e:
        raise GridCorruptionError(f"Cannot read grid file {path}: {e}") from e

    stored = stored.decode() if isinstance(stored, bytes) else str(stored)
    if stored != _checksum(arrays, header):
        raise GridCorruptionError(f"Checksum mismatch in grid file {path}")
    return SigmaGrid(
        mesh=header["mesh"],
        delta_convention=header["delta_convention"],
        alpha=header["alpha"],
        seed=header["seed"],
        budgets=SigmaBudgets(**header["budgets"]),
        **arrays,
    )
