"""
Contours, regions, medians, coverage and error diagnostics of fitted maps.

Off-grid orders use per-direction linear interpolation between adjacent rings
(the median acts as ring 0; orders beyond the outer ring extrapolate from the
last two rings). Contours are never smoothed.
"""

from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np
import numpy.typing as npt
import structlog
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from vqar.core.estimator import QuantileEstimator
from vqar.core.transport import QuantileMap
from vqar.errors import ConfigurationError
from vqar.errors import DimensionUnsupportedError
from vqar.errors import EmptySupportError
from vqar.errors import GridMismatchError
from vqar.errors import InsufficientDataError
from vqar.errors import TauOutOfRangeError
from vqar.models.config import FitConfig

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

RING_TOL = 1e-9
BOUNDARY_TOL = 1e-12
DEFAULT_MIN_T = 500


@dataclass(frozen=True, eq=False)
class ContourSet:
    """Per-tau vertex lists plus the median of one fitted map.

    For d=2 each contour is a closed polygon in grid-angle order (first
    vertex not repeated). For other d the vertices are in direction order.
    """

    x: Optional[FloatArray]
    taus: list[float]
    contours: list[FloatArray]
    median: FloatArray
    monotone_max_violation: Optional[float] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "x": None if self.x is None else self.x.tolist(),
            "taus": list(self.taus),
            "contours": [c.tolist() for c in self.contours],
            "median": self.median.tolist(),
            "monotone_max_violation": self.monotone_max_violation,
        }
        out.update(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ContourSet":
        known = {"x", "taus", "contours", "median", "monotone_max_violation"}
        return cls(
            x=None if data.get("x") is None else np.asarray(data["x"], dtype=np.float64),
            taus=[float(t) for t in data.get("taus", [])],
            contours=[np.asarray(c, dtype=np.float64) for c in data.get("contours", [])],
            median=np.asarray(data["median"], dtype=np.float64),
            monotone_max_violation=data.get("monotone_max_violation"),
            extra={k: v for k, v in data.items() if k not in known},
        )

    def rows(self) -> list[tuple[float, int, float, float]]:
        """(tau, angle_index, y1, y2) per vertex, d=2 only."""
        out = []
        for tau, poly in zip(self.taus, self.contours):
            for s, (y1, y2) in enumerate(poly[:, :2]):
                out.append((tau, s, float(y1), float(y2)))
        return out


def _check_tau(tau: float) -> None:
    if not 0.0 < tau < 1.0:
        raise TauOutOfRangeError(tau)


def level_vertices(qmap: QuantileMap, tau: float) -> FloatArray:
    """Per-direction images at order tau, in direction-index order (any d)."""
    _check_tau(tau)
    grid = qmap.grid
    radii = grid.ring_radii
    hit = np.flatnonzero(np.abs(radii - tau) <= RING_TOL)
    if hit.size:
        return np.array(qmap.images[grid.ring(int(hit[0]) + 1)])

    rings = qmap.images[: grid.k_R * grid.k_S].reshape(grid.k_R, grid.k_S, grid.d)
    levels = np.concatenate([[0.0], radii])
    stacked = np.concatenate([qmap.median[None, None, :].repeat(grid.k_S, axis=1), rings])
    if tau > radii[-1]:
        lo, hi = len(levels) - 2, len(levels) - 1
    else:
        hi = int(np.searchsorted(levels, tau))
        lo = hi - 1
    w = (tau - levels[lo]) / (levels[hi] - levels[lo])
    return np.asarray(stacked[lo] + w * (stacked[hi] - stacked[lo]))


def contour(qmap: QuantileMap, tau: float) -> FloatArray:
    """Closed polygon of order tau, vertices ordered by grid angle (d=2)."""
    if qmap.grid.d != 2:
        raise DimensionUnsupportedError("contour", qmap.grid.d)
    vertices = level_vertices(qmap, tau)
    return vertices[qmap.grid.angle_order()]


def median(qmap: QuantileMap) -> FloatArray:
    """Image of the origin gridpoint."""
    return qmap.median


def contours(
    qmap: QuantileMap,
    taus: Sequence[float],
    monotone_max_violation: Optional[float] = None,
) -> ContourSet:
    ordered = [float(t) for t in taus]
    if qmap.grid.d == 2:
        polys = [contour(qmap, t) for t in ordered]
    else:
        polys = [level_vertices(qmap, t) for t in ordered]
    return ContourSet(
        x=qmap.x,
        taus=ordered,
        contours=polys,
        median=np.array(qmap.median),
        monotone_max_violation=monotone_max_violation,
    )


# ---- regions ----


def _on_segments(y: FloatArray, a: FloatArray, b: FloatArray, tol: float) -> bool:
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.where(denom > 0, np.einsum("ij,ij->i", y - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return bool(np.min(np.linalg.norm(y - closest, axis=1)) <= tol)


def point_in_polygon(y: Any, polygon: FloatArray, tol: float = BOUNDARY_TOL) -> bool:
    """Even-odd rule; points within tol of an edge count as inside."""
    y = np.asarray(y, dtype=np.float64).reshape(2)
    a = polygon
    b = np.roll(polygon, -1, axis=0)
    if _on_segments(y, a, b, tol):
        return True
    straddle = (a[:, 1] > y[1]) != (b[:, 1] > y[1])
    if not np.any(straddle):
        return False
    a_s, b_s = a[straddle], b[straddle]
    x_cross = a_s[:, 0] + (y[1] - a_s[:, 1]) * (b_s[:, 0] - a_s[:, 0]) / (b_s[:, 1] - a_s[:, 1])
    return bool(np.count_nonzero(x_cross > y[0]) % 2 == 1)


def _radial_contains(qmap: QuantileMap, tau: float, y: FloatArray) -> bool:
    """Nearest-direction radial comparison for general d."""
    center = qmap.median
    rays = level_vertices(qmap, tau) - center
    v = y - center
    vnorm = float(np.linalg.norm(v))
    if vnorm <= BOUNDARY_TOL:
        return True
    lengths = np.linalg.norm(rays, axis=1)
    safe = np.where(lengths > 0, lengths, 1.0)
    cosines = (rays @ v) / (safe * vnorm)
    cosines = np.where(lengths > 0, cosines, -np.inf)
    s = int(np.argmax(cosines))
    return bool(vnorm <= lengths[s] + BOUNDARY_TOL)


def region_contains(qmap: QuantileMap, tau: float, y: Any) -> bool:
    """Whether y lies in the order-tau prediction region (inside or on the contour)."""
    _check_tau(tau)
    y_arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if qmap.grid.d == 2:
        return point_in_polygon(y_arr, contour(qmap, tau))
    return _radial_contains(qmap, tau, y_arr)


# ---- coverage ----


def evaluation_indices(T: int, fraction: float, seed: int = 0) -> npt.NDArray[np.intp]:
    """Sorted, seeded subset of transition indices 0..T-2."""
    n_trans = T - 1
    count = max(1, min(n_trans, int(round(fraction * n_trans))))
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n_trans, size=count, replace=False)).astype(np.intp)


def coverage_table(
    estimator: QuantileEstimator,
    taus: Sequence[float],
    eval_indices: Sequence[int],
) -> dict[float, float]:
    """Leave-one-out coverage per tau: one fit per evaluation time, every tau checked."""
    for tau in taus:
        _check_tau(tau)
    hits = np.zeros(len(taus))
    evaluated = 0
    for t in eval_indices:
        t = int(t)
        try:
            qmap = estimator.fit_at(estimator.series[t], exclude=t)
        except EmptySupportError:
            logger.debug("coverage.empty_support", t=t)
            continue
        target = estimator.series[t + 1]
        for n, tau in enumerate(taus):
            hits[n] += region_contains(qmap, tau, target)
        evaluated += 1
    if evaluated == 0:
        raise InsufficientDataError(1, 0)
    logger.info("coverage.done", evaluated=evaluated, skipped=len(eval_indices) - evaluated)
    return {float(tau): float(h / evaluated) for tau, h in zip(taus, hits)}


def coverage_rate(
    series: Any,
    tau: float,
    fit_config: FitConfig,
    *,
    eval_fraction: float = 0.05,
    eval_indices: Optional[Sequence[int]] = None,
    min_T: int = DEFAULT_MIN_T,
    seed: int = 0,
) -> float:
    """Fraction of evaluation times t whose successor x_{t+1} falls in the region
    fitted at x_t without the pair (x_t, x_{t+1})."""
    _check_tau(tau)
    T = len(series)
    if T < min_T:
        raise InsufficientDataError(min_T, T)
    estimator = QuantileEstimator(series, fit_config)
    idx = eval_indices if eval_indices is not None else evaluation_indices(T, eval_fraction, seed)
    return coverage_table(estimator, [tau], idx)[float(tau)]


# ---- error diagnostics ----


def quantile_mse(
    qmap: QuantileMap, reference: QuantileMap, annulus: tuple[float, float] = (0.2, 0.9)
) -> float:
    """Average squared image distance over gridpoints with r_lo <= |u| <= r_hi."""
    if not qmap.grid.same_as(reference.grid):
        raise GridMismatchError()
    r_lo, r_hi = annulus
    if not 0.0 < r_lo < r_hi < 1.0:
        raise ConfigurationError(f"annulus must satisfy 0 < r_lo < r_hi < 1, got {annulus}")
    radii = qmap.grid.radii
    mask = (radii >= r_lo - RING_TOL) & (radii <= r_hi + RING_TOL)
    if not np.any(mask):
        raise ConfigurationError(f"no gridpoints in annulus {annulus}")
    diff = qmap.images[mask] - reference.images[mask]
    return float(np.mean(np.sum(diff**2, axis=1)))


def polygon_area(polygon: FloatArray) -> float:
    """Absolute shoelace area."""
    x, y = polygon[:, 0], polygon[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _segments_cross(p1: FloatArray, p2: FloatArray, q1: FloatArray, q2: FloatArray) -> bool:
    def orient(a: FloatArray, b: FloatArray, c: FloatArray) -> float:
        return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def is_simple_polygon(polygon: FloatArray) -> bool:
    """No two non-adjacent edges properly cross."""
    n = polygon.shape[0]
    if n < 4:
        return True
    for i in range(n):
        a1, a2 = polygon[i], polygon[(i + 1) % n]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(a1, a2, polygon[j], polygon[(j + 1) % n]):
                return False
    return True


def nonconvexity(polygon: FloatArray) -> float:
    """Convex hull area over polygon area, minus one (0 for convex polygons)."""
    area = polygon_area(polygon)
    if area <= 0.0:
        return 0.0
    try:
        hull = ConvexHull(polygon)
    except QhullError:
        return 0.0
    return float(hull.volume / area - 1.0)


def nesting_report(cs: ContourSet) -> list[dict[str, Any]]:
    """Soft nesting diagnostics between consecutive orders (d=2).

    Vertex containment is only checked when the outer polygon is simple.
    """
    order = np.argsort(cs.taus)
    report = []
    for lo, hi in zip(order[:-1], order[1:]):
        inner, outer = cs.contours[lo], cs.contours[hi]
        entry: dict[str, Any] = {
            "tau_inner": cs.taus[lo],
            "tau_outer": cs.taus[hi],
            "area_ordered": polygon_area(inner) <= polygon_area(outer) + BOUNDARY_TOL,
            "outer_simple": is_simple_polygon(outer),
        }
        if entry["outer_simple"]:
            entry["vertices_nested"] = all(point_in_polygon(v, outer) for v in inner)
        else:
            entry["vertices_nested"] = None
            logger.debug("quantile.nesting_skipped", tau=cs.taus[hi])
        report.append(entry)
    return report


def points_on_contour(qmap: QuantileMap, tau: float, count: int = 8) -> FloatArray:
    """count vertices spread evenly in angle along the order-tau contour."""
    poly = contour(qmap, tau)
    picks = np.floor(np.arange(count) * poly.shape[0] / count).astype(np.intp)
    return np.asarray(poly[picks])
