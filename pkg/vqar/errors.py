"""
vqar error hierarchy. One file, one concern.

Every error carries a stable string code and the exit code the CLI maps it to:
2 configuration, 3 data, 4 numerical failure.
"""

from typing import Any
from typing import Optional


class VQARError(Exception):
    """Base exception for vqar errors."""

    exit_code = 1

    def __init__(
        self, code: str, message: str, details: Optional[dict[str, Any]] = None
    ):
        self.code = code
        self.message = message
        self.details = details or {}
        super().__init__(message)


# ---- configuration (exit 2) ----


class ConfigurationError(VQARError):
    """Invalid or inconsistent configuration."""

    exit_code = 2

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__("CONFIGURATION", message, details)


class InvalidDimensionError(VQARError):
    """Dimension must be a positive integer."""

    exit_code = 2

    def __init__(self, d: int):
        super().__init__("INVALID_DIMENSION", f"Invalid dimension: {d}", {"d": d})


class InvalidCountError(VQARError):
    """A count parameter (k_R, k_S, N, ...) is out of range."""

    exit_code = 2

    def __init__(self, name: str, value: int, reason: str = "must be >= 1"):
        super().__init__(
            "INVALID_COUNT", f"Invalid {name}={value}: {reason}", {name: value}
        )


class TauOutOfRangeError(VQARError):
    """Quantile order outside the open unit interval."""

    exit_code = 2

    def __init__(self, tau: float):
        super().__init__("TAU_OUT_OF_RANGE", f"tau must lie in (0, 1), got {tau}")


class DimensionUnsupportedError(VQARError):
    """Operation only defined for a specific dimension."""

    exit_code = 2

    def __init__(self, operation: str, d: int):
        super().__init__(
            "DIMENSION_UNSUPPORTED", f"{operation} requires d=2, got d={d}"
        )


class GridMismatchError(VQARError):
    """Two quantile maps live on different grids."""

    exit_code = 2

    def __init__(self) -> None:
        super().__init__("GRID_MISMATCH", "Quantile maps are defined on different grids")


class SizeExceededError(VQARError):
    """Instance too large for brute-force enumeration."""

    exit_code = 2

    def __init__(self, k: int, m: int, limit: int):
        super().__init__(
            "SIZE_EXCEEDED",
            f"Brute force limited to {limit}x{limit} instances, got {k}x{m}",
        )


# ---- data (exit 3) ----


class DataError(VQARError):
    """Input data cannot support the requested computation."""

    exit_code = 3

    def __init__(self, code: str, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(code, message, details)


class InsufficientPointsError(DataError):
    """Fewer points than the operation needs."""

    def __init__(self, needed: int, got: int):
        super().__init__(
            "INSUFFICIENT_POINTS", f"Need at least {needed} points, got {got}"
        )


class EmptySupportError(DataError):
    """No kernel mass anywhere: no neighbors within bandwidth."""

    def __init__(self, x: Any = None):
        super().__init__(
            "EMPTY_SUPPORT",
            "No neighbors within bandwidth of the conditioning point",
            {"x": None if x is None else [float(v) for v in x]},
        )


class OddLengthError(DataError):
    """Stationary estimator needs an even-length series."""

    def __init__(self, length: int):
        super().__init__("ODD_LENGTH", f"Series length must be even, got {length}")


class InsufficientDataError(DataError):
    """Series shorter than a configured minimum."""

    def __init__(self, needed: int, got: int):
        super().__init__(
            "INSUFFICIENT_DATA", f"Series needs at least {needed} points, got {got}"
        )


class NonfiniteInputError(DataError):
    """NaN or infinity in numeric input."""

    def __init__(self, what: str):
        super().__init__("NONFINITE_INPUT", f"Non-finite values in {what}")


class SeriesIOError(DataError):
    """Series or artifact file cannot be read or written."""

    def __init__(self, path: str, reason: str):
        super().__init__("IO_ERROR", f"{path}: {reason}", {"path": path})


# ---- numerical (exit 4) ----


class NumericalError(VQARError):
    """Numerical procedure failed."""

    exit_code = 4

    def __init__(self, code: str, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(code, message, details)


class InfeasibleMarginalsError(NumericalError):
    """Source and target masses differ."""

    def __init__(self, source_mass: float, target_mass: float):
        super().__init__(
            "INFEASIBLE_MARGINALS",
            f"Marginal masses differ: {source_mass!r} vs {target_mass!r}",
        )


class SolverFailureError(NumericalError):
    """Transport solver did not reach an optimal basis."""

    def __init__(self, reason: str, details: Optional[dict[str, Any]] = None):
        super().__init__("SOLVER_FAILURE", f"Transport solver failed: {reason}", details)


class DegenerateRowError(NumericalError):
    """A grid row carries no mass in the plan."""

    def __init__(self, row: int):
        super().__init__("DEGENERATE_ROW", f"Plan row {row} has zero mass", {"row": row})


class DegenerateScaleError(NumericalError):
    """Conditional law is a point mass; no region of positive size exists."""

    def __init__(self, scale: float):
        super().__init__(
            "DEGENERATE_SCALE", f"Noise scale vanishes at this point ({scale!r})"
        )
