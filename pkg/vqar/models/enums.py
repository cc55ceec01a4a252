"""
Enums for kernels, grid schedules and simulated processes.
"""

from enum import Enum


class KernelKind(str, Enum):
    """kernel families for the conditional estimator"""

    GAUSSIAN_TRUNCATED_KNN = "gaussian_truncated_knn"
    INDICATOR = "indicator"
    GAUSSIAN = "gaussian"


class SimCase(int, Enum):
    """data-generating processes of the simulation study"""

    HETEROSKEDASTIC = 1
    BOUNDED_DRIFT = 2
    ROTATING_CLOVER = 3


class GridSchedule(str, Enum):
    """how the reference grid size follows the series length"""

    FIXED = "fixed"
    GROWING = "growing"
