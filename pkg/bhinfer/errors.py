"""Exceptions raised by bhinfer."""

from __future__ import annotations

__all__ = [
    "BHError",
    "DatasetError",
    "DomainError",
    "ExtrapolationError",
    "GridBuildError",
    "GridCorruptionError",
    "GridFileError",
    "GridRequiredError",
    "GridVersionError",
    "InsufficientDataError",
    "NoSubdominantEigenvalueError",
    "NumericConsistencyError",
    "PipelineError",
    "PoleError",
    "PopulationLimitError",
    "ProportionalCountsError",
    "RegimeMismatchError",
    "ReplicateError",
    "UnsupportedAgeError",
]


class BHError(Exception):
    pass


class DomainError(BHError, ValueError):
    pass


class PoleError(DomainError):
    pass


class NoSubdominantEigenvalueError(DomainError):
    pass


class NumericConsistencyError(BHError, ArithmeticError):
    pass


class UnsupportedAgeError(NumericConsistencyError):
    pass


class PopulationLimitError(BHError, RuntimeError):
    pass


class ReplicateError(BHError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"replicate {index} failed: {cause}")
        self.index = index
        self.cause = cause

    def __reduce__(self):
        return (self.__class__, (self.index, self.cause))


class GridBuildError(BHError):
    def __init__(self, message: str, failed_nodes: list[float] | None = None):
        super().__init__(message)
        self.failed_nodes = failed_nodes or []

    def __reduce__(self):
        return (self.__class__, (str(self), self.failed_nodes))


class GridFileError(BHError, OSError):
    pass


class GridCorruptionError(GridFileError):
    pass


class GridVersionError(GridFileError):
    pass


class DatasetError(BHError, ValueError):
    pass


class InsufficientDataError(BHError, ValueError):
    pass


class RegimeMismatchError(BHError):
    pass


class ProportionalCountsError(BHError):
    pass


class ExtrapolationError(BHError):
    pass


class GridRequiredError(BHError):
    pass


class PipelineError(BHError):
    """Failure of one pipeline stage; the original exception is chained as ``__cause__``."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause

    def __reduce__(self):
        return (self.__class__, (self.stage, self.cause))
