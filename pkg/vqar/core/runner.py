"""
FitRunner -- fans conditioning points out over a bounded worker pool.

Each point runs NW weights -> transport -> barycentric map -> contours in a
worker thread (asyncio.to_thread under a semaphore). Empty supports are
recorded per point and the batch continues; solver failures abort the batch.
Results come back in input order regardless of completion order.
"""

import asyncio
import time
from dataclasses import dataclass
from typing import Any
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
import structlog
from prometheus_client import Counter
from prometheus_client import Histogram

from vqar.core.estimator import PanelQuantileEstimator
from vqar.core.estimator import QuantileEstimator
from vqar.core.quantile import ContourSet
from vqar.core.quantile import contours
from vqar.core.transport import QuantileMap
from vqar.core.transport import check_monotone
from vqar.errors import DataError
from vqar.errors import SolverFailureError

logger = structlog.get_logger(__name__)

_bind_contextvars = structlog.contextvars.bind_contextvars
_unbind_contextvars = structlog.contextvars.unbind_contextvars

POINTS_TOTAL = Counter("vqar_points_total", "conditioning points processed", ["outcome"])
POINT_LATENCY = Histogram("vqar_point_latency_seconds", "fit time per conditioning point")


@dataclass
class PointResult:
    """Outcome for one conditioning point: contours or an error code."""

    index: int
    x: list[float]
    label: str
    contour_set: Optional[ContourSet] = None
    qmap: Optional[QuantileMap] = None
    error_code: Optional[str] = None
    error_message: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.contour_set is not None


@dataclass(frozen=True)
class PointTask:
    x: Any
    label: str
    exclude: Optional[int] = None


class FitRunner:
    """Runs one estimator over many conditioning points."""

    def __init__(
        self,
        estimator: Union[QuantileEstimator, PanelQuantileEstimator],
        taus: Sequence[float],
        max_workers: int = 4,
    ) -> None:
        self.estimator = estimator
        self.taus = [float(t) for t in taus]
        self.max_workers = max(1, max_workers)

    def fit_point(self, index: int, task: PointTask) -> PointResult:
        """Synchronous unit of work; raises SolverFailureError, captures data errors."""
        x = np.asarray(task.x, dtype=np.float64).reshape(-1)
        result = PointResult(index=index, x=x.tolist(), label=task.label)
        t0 = time.monotonic()
        try:
            qmap = self.estimator.fit_at(x, exclude=task.exclude)
        except DataError as exc:
            POINTS_TOTAL.labels(outcome=exc.code.lower()).inc()
            logger.warning("runner.point_failed", point=index, code=exc.code, error=exc.message)
            result.error_code, result.error_message = exc.code, exc.message
            return result
        except SolverFailureError as exc:
            # attach the instance for the CLI's diagnostic dump
            exc.details.update(
                point=index,
                x=x.tolist(),
                sample=self.estimator.weights_at(x, task.exclude).to_dict(),
            )
            raise
        report = check_monotone(qmap)
        if not report.clean:
            logger.warning(
                "runner.monotonicity_violation",
                point=index,
                violation=report.max_violation,
                pair=report.pair,
            )
        result.qmap = qmap
        result.contour_set = contours(qmap, self.taus, report.max_violation)
        POINTS_TOTAL.labels(outcome="ok").inc()
        POINT_LATENCY.observe(time.monotonic() - t0)
        return result

    async def _run_all(self, tasks: Sequence[PointTask]) -> list[PointResult]:
        sem = asyncio.Semaphore(self.max_workers)

        async def _one(index: int, task: PointTask) -> PointResult:
            async with sem:
                _bind_contextvars(point_index=index)
                try:
                    return await asyncio.to_thread(self.fit_point, index, task)
                finally:
                    _unbind_contextvars("point_index")

        return list(await asyncio.gather(*(_one(i, t) for i, t in enumerate(tasks))))

    def run(self, tasks: Sequence[PointTask]) -> list[PointResult]:
        """Fit every task; results in input order."""
        try:
            results = asyncio.run(self._run_all(tasks))
        except SolverFailureError:
            logger.error("runner.solver_failure", points=len(tasks))
            raise
        failed = sum(1 for r in results if not r.ok)
        logger.info("runner.completed", points=len(results), failed=failed)
        return results
