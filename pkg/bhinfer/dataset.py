"""Observed population counts on a uniform time grid, and their text file format.

File layout::

    # bhinfer-dataset v1
    # grid_step=4.3322
    # units=minutes
    # count_mode=absolute
    # start_time=0
    1,1,2,2,...
    1,2,2,NA,...

Header lines are ``# key=value`` pairs, every other non-empty line is one trajectory.
``NA`` marks a missing or excluded entry. ``count_scale`` is optional for proportional
counts and gives the measured units per individual when it is known.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from bhinfer.errors import DatasetError

__all__ = ["CountMode", "Dataset", "read_dataset", "write_dataset"]

FORMAT_TAG = "bhinfer-dataset v1"
MISSING = "NA"
INTEGRALITY_TOL = 1e-9
RESERVED_KEYS = ("grid_step", "units", "count_mode", "start_time", "count_scale")


class CountMode(str, Enum):
    ABSOLUTE = "absolute"
    PROPORTIONAL = "proportional"

    def __str__(self) -> str:
        return self.value


def _check_scale(scale: float | None, mode: CountMode) -> float | None:
    if mode == CountMode.ABSOLUTE:
        if scale not in {None, 1.0}:
            raise DatasetError(f"Absolute counts have count_scale 1, got {scale}")
        return 1.0
    if scale is None:
        return None
    scale = float(scale)
    if not math.isfinite(scale) or scale <= 0:
        raise DatasetError(f"count_scale must be > 0, got {scale}")
    return scale


@dataclass
class Dataset:
    """Counts of ``n_data`` trajectories observed at ``start_time + i * grid_step``.

    Masked entries are stored as NaN in ``counts`` and False in ``valid``.
    ``count_scale`` is the number of count units per individual: always 1 for absolute
    counts, None for proportional counts of unknown scale.
    """

    grid_step: float
    counts: np.ndarray
    valid: np.ndarray | None = None
    units: str = "time"
    count_mode: CountMode = CountMode.ABSOLUTE
    start_time: float = 0.0
    count_scale: float | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.grid_step) or self.grid_step <= 0:
            raise DatasetError(f"grid_step must be > 0, got {self.grid_step}")
        self.count_mode = CountMode(self.count_mode)
        self.count_scale = _check_scale(self.count_scale, self.count_mode)
        counts = np.array(self.counts, dtype=float, ndmin=2)
        if counts.ndim != 2 or counts.shape[1] < 2:
            raise DatasetError(
                f"counts must be a 2D matrix with >= 2 time points, got {counts.shape}"
            )
        valid = np.isfinite(counts)
        if self.valid is not None:
            mask = np.asarray(self.valid, dtype=bool)
            if mask.shape != counts.shape:
                raise DatasetError(f"valid mask shape {mask.shape} != counts shape {counts.shape}")
            valid &= mask
        counts[~valid] = np.nan
        observed = counts[valid]
        if self.count_mode == CountMode.ABSOLUTE:
            if np.any(observed <= 0):
                raise DatasetError("Absolute counts must be positive")
            if np.any(np.abs(observed - np.round(observed)) > INTEGRALITY_TOL):
                raise DatasetError("Absolute counts must be integers")
        self.counts = counts
        self.valid = valid
        self.metadata = {str(k): str(v) for k, v in self.metadata.items()}

    @property
    def n_data(self) -> int:
        return self.counts.shape[0]

    @property
    def n_times(self) -> int:
        return self.counts.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.grid_step * np.arange(self.n_times)

    def mean_counts(self) -> np.ndarray:
        """Mean over trajectories of the valid entries, NaN where none is valid."""
        n_valid = self.valid.sum(axis=0)
        total = np.where(self.valid, self.counts, 0.0).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n_valid > 0, total / np.maximum(n_valid, 1), np.nan)

    def scaled(self, factor: float) -> Dataset:
        """Counts multiplied by ``factor``, as proportional measurements."""
        if factor <= 0:
            raise DatasetError(f"Scale factor must be > 0, got {factor}")
        return replace(
            self,
            counts=self.counts * factor,
            valid=self.valid.copy(),
            count_mode=CountMode.PROPORTIONAL,
            count_scale=None if self.count_scale is None else self.count_scale * factor,
        )

    def rescaled_time(self, factor: float) -> Dataset:
        if factor <= 0:
            raise DatasetError(f"Time factor must be > 0, got {factor}")
        return replace(
            self,
            grid_step=self.grid_step * factor,
            start_time=self.start_time * factor,
            counts=self.counts.copy(),
            valid=self.valid.copy(),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.grid_step == other.grid_step
            and self.units == other.units
            and self.count_mode == other.count_mode
            and self.start_time == other.start_time
            and self.count_scale == other.count_scale
            and self.metadata == other.metadata
            and np.array_equal(self.valid, other.valid)
            and np.array_equal(self.counts, other.counts, equal_nan=True)
        )


def _format(value: float) -> str:
    return f"{value:.17g}"


def write_dataset(ds: Dataset, path: Path | str) -> Path:
    path = Path(path)
    header = {
        "grid_step": _format(ds.grid_step),
        "units": ds.units,
        "count_mode": ds.count_mode.value,
        "start_time": _format(ds.start_time),
        **ds.metadata,
    }
    if ds.count_mode == CountMode.PROPORTIONAL and ds.count_scale is not None:
        header["count_scale"] = _format(ds.count_scale)
    lines = [f"# {FORMAT_TAG}"]
    lines += [f"# {key}={value}" for key, value in header.items()]
    for row, mask in zip(ds.counts, ds.valid):
        lines.append(",".join(_format(v) if ok else MISSING for v, ok in zip(row, mask)))
    path.write_text("\n".join(lines) + "\n")
    return path


def _parse_value(token: str, line_no: int) -> float:
    token = token.strip()
    if token == MISSING:
        return math.nan
    try:
        return float(token)
    except ValueError:
        raise DatasetError(f"line {line_no}: cannot parse count {token!r}") from None


def read_dataset(path: Path | str) -> Dataset:
    """Read a dataset file written by :func:`write_dataset` or by hand.

    The first non-empty line must be the format tag ``# bhinfer-dataset v1``.
    """
    path = Path(path)
    header: dict[str, str] = {}
    rows: list[list[float]] = []
    tagged = False
    with open(path) as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            if not tagged:
                if not line.startswith("#") or line.lstrip("#").strip() != FORMAT_TAG:
                    raise DatasetError(f"{path}: expected '# {FORMAT_TAG}', got {line!r}")
                tagged = True
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    header[key.strip()] = value.strip()
                continue
            rows.append([_parse_value(t, line_no) for t in line.split(",")])

    if not tagged:
        raise DatasetError(f"{path}: empty file, missing '# {FORMAT_TAG}'")
    if "grid_step" not in header:
        raise DatasetError(f"{path}: missing 'grid_step' header")
    if not rows:
        raise DatasetError(f"{path}: no trajectories")
    if len({len(r) for r in rows}) != 1:
        raise DatasetError(f"{path}: ragged rows, lengths {sorted({len(r) for r in rows})}")
    try:
        grid_step = float(header["grid_step"])
        start_time = float(header.get("start_time", 0.0))
        count_mode = CountMode(header.get("count_mode", CountMode.ABSOLUTE.value))
        count_scale = float(header["count_scale"]) if "count_scale" in header else None
    except ValueError as e:
        raise DatasetError(f"{path}: invalid header: {e}") from e

    return Dataset(
        grid_step=grid_step,
        counts=np.array(rows, dtype=float),
        units=header.get("units", "time"),
        count_mode=count_mode,
        start_time=start_time,
        count_scale=count_scale,
        metadata={k: v for k, v in header.items() if k not in RESERVED_KEYS},
    )
