"""
QuantileEstimator -- kernel weights, transport solve and barycentric map wired
together for one series (or a panel of realizations).

The bandwidth, grid, grid measure and neighbor index are built once; every
conditioning point then costs one kNN query and one transport solve.
"""

from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np
import numpy.typing as npt
import structlog

from vqar.core.grid import SphericalGrid
from vqar.core.grid import grid_from_config
from vqar.core.grid import grid_measure
from vqar.core.kernel import NeighborIndex
from vqar.core.kernel import WeightedSample
from vqar.core.kernel import empirical_stationary
from vqar.core.kernel import nw_weights
from vqar.core.kernel import nw_weights_panel
from vqar.core.kernel import resolve_bandwidth
from vqar.core.kernel import resolve_panel_bandwidth
from vqar.core.transport import QuantileMap
from vqar.core.transport import barycentric_map
from vqar.core.transport import solve_transport
from vqar.errors import ConfigurationError
from vqar.errors import EmptySupportError
from vqar.errors import InsufficientPointsError
from vqar.errors import NonfiniteInputError
from vqar.models.config import FitConfig
from vqar.models.enums import KernelKind

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


def _check_series(series: Any) -> FloatArray:
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ConfigurationError(f"series must be T x d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonfiniteInputError("series")
    return arr


class QuantileEstimator:
    """Conditional center-outward quantile maps of X_{t+1} given X_t = x."""

    def __init__(self, series: Any, config: FitConfig) -> None:
        self.series = _check_series(series)
        T, d = self.series.shape
        if T < 2:
            raise EmptySupportError()
        grid_cfg = config.grid if config.grid.d == d else config.grid.model_copy(update={"d": d})
        self.config = FitConfig(grid=grid_cfg, kernel=config.kernel.with_neighbors(grid_cfg))
        self.grid: SphericalGrid = grid_from_config(grid_cfg)
        self.reference: WeightedSample = grid_measure(self.grid)
        self.bandwidth = resolve_bandwidth(self.config.kernel, self.series)
        self._index: Optional[NeighborIndex] = None
        if self.config.kernel.kind is KernelKind.GAUSSIAN_TRUNCATED_KNN:
            self._index = NeighborIndex(self.series[:-1])
        logger.info(
            "estimator.ready",
            T=T,
            d=d,
            k=self.grid.k,
            kernel=self.config.kernel.kind.value,
            h=self.bandwidth,
        )

    @property
    def T(self) -> int:
        return int(self.series.shape[0])

    def weights_at(self, x: Any, exclude: Optional[int] = None) -> WeightedSample:
        return nw_weights(
            self.series,
            x,
            self.config.kernel,
            bandwidth=self.bandwidth,
            index=self._index,
            exclude=exclude,
        )

    def fit_at(self, x: Any, exclude: Optional[int] = None) -> QuantileMap:
        """Quantile map at x; `exclude` leaves out transition (x_exclude, x_exclude+1)."""
        sample = self.weights_at(x, exclude)
        return self.fit_sample(sample, x)

    def fit_sample(self, sample: WeightedSample, x: Optional[Any] = None) -> QuantileMap:
        plan = solve_transport(self.reference, sample)
        return barycentric_map(plan, sample, self.grid, x)

    def fit_time(self, t: int) -> QuantileMap:
        """Map at the realized x_t, 1-based t as in the series file."""
        if not 1 <= t <= self.T:
            raise ConfigurationError(f"time index {t} outside 1..{self.T}")
        return self.fit_at(self.series[t - 1])

    def predict(self) -> QuantileMap:
        """One-step-ahead map at the last observation x_T."""
        return self.fit_at(self.series[-1])

    def fit_stationary(self, series: Optional[Any] = None) -> QuantileMap:
        """Unconditional map from the even-index estimate of the stationary law."""
        data = self.series if series is None else _check_series(series)
        if data.shape[0] % 2:
            data = data[1:]
        return self.fit_sample(empirical_stationary(data), None)


class PanelQuantileEstimator:
    """Same surface over N independent realizations (averaged NW weights)."""

    def __init__(self, panel: Sequence[Any], config: FitConfig) -> None:
        self.panel = [_check_series(s) for s in panel]
        if not self.panel:
            raise InsufficientPointsError(1, 0)
        d = self.panel[0].shape[1]
        if any(s.shape[1] != d for s in self.panel):
            raise ConfigurationError("panel members differ in dimension")
        grid_cfg = config.grid.model_copy(update={"d": d})
        self.config = FitConfig(grid=grid_cfg, kernel=config.kernel.with_neighbors(grid_cfg))
        self.grid = grid_from_config(grid_cfg)
        self.reference = grid_measure(self.grid)
        self.bandwidth = resolve_panel_bandwidth(self.config.kernel, self.panel)

    def weights_at(self, x: Any, exclude: Optional[int] = None) -> WeightedSample:
        if exclude is not None:
            raise ConfigurationError("leave-one-out is not defined for panel fits")
        return nw_weights_panel(self.panel, x, self.config.kernel, bandwidth=self.bandwidth)

    def fit_at(self, x: Any, exclude: Optional[int] = None) -> QuantileMap:
        sample = self.weights_at(x, exclude)
        plan = solve_transport(self.reference, sample)
        return barycentric_map(plan, sample, self.grid, x)


def var1_mean_forecast(series: Any, x: Any) -> FloatArray:
    """Least-squares VAR(1) with intercept, evaluated at x."""
    arr = _check_series(series)
    if arr.shape[0] < 3:
        raise InsufficientPointsError(3, arr.shape[0])
    design = np.column_stack([np.ones(arr.shape[0] - 1), arr[:-1]])
    coef, *_ = np.linalg.lstsq(design, arr[1:], rcond=None)
    x_arr = np.asarray(x, dtype=np.float64).reshape(-1)
    return np.asarray(coef[0] + x_arr @ coef[1:])
