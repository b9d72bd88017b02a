from __future__ import annotations

from bhinfer.hdf5.grid_file import GRID_FORMAT_VERSION, load_grid, save_grid

__all__ = ["GRID_FORMAT_VERSION", "load_grid", "save_grid"]
