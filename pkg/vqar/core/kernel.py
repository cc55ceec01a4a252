"""
Weighted empirical measures: Nadaraya-Watson conditional estimates from one
or several realizations, and the even-index stationary estimate.

Atoms of a conditional estimate are successors x_{i+1}; the weight of x_{i+1}
is proportional to K((x_i - x)/h). Zero-weight atoms are pruned so the
transport solve only sees strictly positive column marginals.
"""

from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Optional
from typing import Sequence

import numpy as np
import numpy.typing as npt
import structlog
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from vqar.errors import EmptySupportError
from vqar.errors import InsufficientPointsError
from vqar.errors import NonfiniteInputError
from vqar.errors import OddLengthError
from vqar.models.config import KernelSpec
from vqar.models.enums import KernelKind

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.intp]

# above this many points the average pairwise distance is subsampled
EXACT_PAIRWISE_LIMIT = 5000
SUBSAMPLED_PAIRS = 1_000_000

# relative slack when collecting kNN ties from the tree
_TIE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Atoms in R^d with nonnegative weights summing to one.

    `origin` optionally records, per atom, the series index it came from
    (successor index for conditional estimates).
    """

    atoms: FloatArray
    weights: FloatArray
    origin: Optional[IndexArray] = field(default=None)

    def __post_init__(self) -> None:
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=np.float64))
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if atoms.shape[0] != weights.shape[0]:
            raise ValueError(
                f"{atoms.shape[0]} atoms but {weights.shape[0]} weights"
            )
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def dim(self) -> int:
        return int(self.atoms.shape[1])

    @property
    def mean(self) -> FloatArray:
        return np.asarray(self.weights @ self.atoms)

    @classmethod
    def normalized(
        cls,
        atoms: FloatArray,
        raw_weights: FloatArray,
        origin: Optional[IndexArray] = None,
        floor: float = 0.0,
    ) -> "WeightedSample":
        """Drop weights <= floor, rescale, and hand the residual to the largest weight."""
        raw_weights = np.asarray(raw_weights, dtype=np.float64)
        keep = raw_weights > floor
        if not np.any(keep):
            raise ValueError("no positive weight")
        w = raw_weights[keep] / raw_weights[keep].sum()
        top = int(np.argmax(w))
        w[top] += 1.0 - w.sum()
        kept_origin = None if origin is None else np.asarray(origin)[keep]
        return cls(atoms=np.asarray(atoms)[keep], weights=w, origin=kept_origin)

    def translated(self, shift: FloatArray) -> "WeightedSample":
        return WeightedSample(self.atoms + shift, self.weights, self.origin)

    def to_dict(self) -> dict[str, Any]:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}


# ---- bandwidth ----


def avg_pairwise_distance(
    points: FloatArray,
    seed: int = 0,
    exact_limit: int = EXACT_PAIRWISE_LIMIT,
    n_pairs: int = SUBSAMPLED_PAIRS,
) -> float:
    """Mean Euclidean distance over pairs i < j.

    Exact up to exact_limit points; beyond that, the mean over n_pairs
    seeded uniformly drawn pairs with i != j.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    if n < 2:
        raise InsufficientPointsError(2, n)
    if n <= exact_limit:
        return float(pdist(pts).mean())

    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=n_pairs)
    # shift by 1..n-1 so j never equals i
    j = (i + rng.integers(1, n, size=n_pairs)) % n
    return float(np.linalg.norm(pts[i] - pts[j], axis=1).mean())


def resolve_bandwidth(kernel: KernelSpec, points: FloatArray, seed: int = 0) -> float:
    """Absolute h, or ell times the average pairwise distance of points."""
    if kernel.h is not None:
        return float(kernel.h)
    assert kernel.ell is not None
    h = kernel.ell * avg_pairwise_distance(points, seed=seed)
    if not h > 0.0:
        raise InsufficientPointsError(2, 1)
    logger.debug("kernel.bandwidth_resolved", ell=kernel.ell, h=h)
    return h


def resolve_panel_bandwidth(
    kernel: KernelSpec, panel: Sequence[FloatArray], seed: int = 0
) -> float:
    """Common h for a panel: absolute h, or ell times the mean of the per-series
    average pairwise distances (cross-series pairs never enter)."""
    if kernel.h is not None:
        return float(kernel.h)
    assert kernel.ell is not None
    if not panel:
        raise InsufficientPointsError(1, 0)
    spread = float(np.mean([avg_pairwise_distance(s, seed=seed) for s in panel]))
    h = kernel.ell * spread
    if not h > 0.0:
        raise InsufficientPointsError(2, 1)
    logger.debug("kernel.panel_bandwidth_resolved", ell=kernel.ell, h=h, members=len(panel))
    return h


# ---- neighbor index ----


class NeighborIndex:
    """kd-tree over the predecessors x_1..x_{T-1} of a series."""

    def __init__(self, predecessors: FloatArray) -> None:
        self.points = np.atleast_2d(np.asarray(predecessors, dtype=np.float64))
        self._tree = cKDTree(self.points)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def nearest(
        self, x: FloatArray, count: int, exclude: Optional[int] = None
    ) -> tuple[IndexArray, FloatArray]:
        """The count nearest predecessors plus every point tied with the last one."""
        n = len(self)
        want = min(count + (0 if exclude is None else 1), n)
        dist, _ = self._tree.query(x, k=want)
        radius = float(np.max(np.atleast_1d(dist)))
        cand = np.asarray(
            self._tree.query_ball_point(x, r=radius * (1.0 + _TIE_SLACK) + 1e-300),
            dtype=np.intp,
        )
        if exclude is not None:
            cand = cand[cand != exclude]
        d = np.linalg.norm(self.points[cand] - x, axis=1)
        order = np.lexsort((cand, d))
        cand, d = cand[order], d[order]
        if cand.size > count:
            cutoff = d[count - 1]
            keep = d <= cutoff
            cand, d = cand[keep], d[keep]
        return cand, d


# ---- estimators ----


def _as_series(series: Sequence[Any]) -> FloatArray:
    arr = np.asarray(series, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if not np.all(np.isfinite(arr)):
        raise NonfiniteInputError("series")
    return arr


def nw_weights(
    series: Sequence[Any],
    x: Sequence[float],
    kernel: KernelSpec,
    *,
    bandwidth: Optional[float] = None,
    index: Optional[NeighborIndex] = None,
    exclude: Optional[int] = None,
) -> WeightedSample:
    """Nadaraya-Watson estimate of the law of X_{t+1} given X_t = x.

    `exclude` drops the transition (x_exclude, x_exclude+1), 0-based, for
    leave-one-out evaluation. `bandwidth` and `index` let callers reuse a
    resolved h and a prebuilt kd-tree across many conditioning points.
    """
    arr = _as_series(series)
    T = arr.shape[0]
    x_arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x_arr)):
        raise NonfiniteInputError("conditioning point")
    if T < 2:
        # no transitions to weight
        raise EmptySupportError(x_arr)

    h = bandwidth if bandwidth is not None else resolve_bandwidth(kernel, arr)
    predecessors = arr[:-1]
    successors = arr[1:]

    if kernel.kind is KernelKind.GAUSSIAN_TRUNCATED_KNN:
        count = kernel.neighbor_count or len(predecessors)
        idx = index if index is not None else NeighborIndex(predecessors)
        support, dist = idx.nearest(x_arr, count, exclude=exclude)
        if support.size == 0:
            raise EmptySupportError(x_arr)
        # weights proportional to exp(-d^2/h^2), shifted by the nearest distance
        raw = np.exp(-(dist**2 - dist[0] ** 2) / h**2)
    else:
        dist_all = np.linalg.norm(predecessors - x_arr, axis=1)
        support = np.arange(len(predecessors), dtype=np.intp)
        if exclude is not None:
            support = support[support != exclude]
        dist = dist_all[support]
        if kernel.kind is KernelKind.INDICATOR:
            raw = (dist <= h).astype(np.float64)
        else:
            expo = -0.5 * (dist / h) ** 2
            raw = np.exp(expo - expo.max()) if expo.size else expo

    if raw.size == 0 or not np.any(raw > 0.0):
        logger.debug("kernel.empty_support", x=x_arr.tolist(), h=h, kind=kernel.kind.value)
        raise EmptySupportError(x_arr)

    return WeightedSample.normalized(successors[support], raw, origin=support + 1)


def nw_weights_panel(
    panel: Sequence[Sequence[Any]],
    x: Sequence[float],
    kernel: KernelSpec,
    *,
    bandwidth: Optional[float] = None,
) -> WeightedSample:
    """Average of per-series NW estimates with factor 1/N.

    Realizations without kernel mass near x contribute nothing; the average
    runs over the others. Atoms from different series stay distinct.
    """
    arrays = [_as_series(s) for s in panel]
    if not arrays:
        raise InsufficientPointsError(1, 0)

    h = bandwidth
    if h is None:
        h = resolve_panel_bandwidth(kernel, arrays)

    parts: list[WeightedSample] = []
    for n, arr in enumerate(arrays):
        try:
            parts.append(nw_weights(arr, x, kernel, bandwidth=h))
        except EmptySupportError:
            logger.debug("kernel.panel_member_empty", member=n)
    if not parts:
        raise EmptySupportError(np.asarray(x, dtype=np.float64))
    if len(parts) == 1:
        return parts[0]

    atoms = np.vstack([p.atoms for p in parts])
    weights = np.concatenate([p.weights for p in parts]) / len(parts)
    return WeightedSample.normalized(atoms, weights)


def empirical_stationary(series: Sequence[Any]) -> WeightedSample:
    """Atoms x_2, x_4, ..., x_T' each with weight 2/T'."""
    arr = _as_series(series)
    T = arr.shape[0]
    if T < 2:
        raise InsufficientPointsError(2, T)
    if T % 2:
        raise OddLengthError(T)
    atoms = arr[1::2]
    weights = np.full(atoms.shape[0], 2.0 / T)
    weights[-1] = 1.0 - weights[:-1].sum()
    return WeightedSample(atoms=atoms, weights=weights, origin=np.arange(1, T, 2))
