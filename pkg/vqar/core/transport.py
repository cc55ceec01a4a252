"""
Discrete optimal transport from the grid measure to a weighted sample, and the
barycentric quantile map it induces.

The transportation LP with cost 1/2 |u - x|^2 is solved exactly by the network
simplex in POT (`ot.emd`), which returns a basic optimal plan together with
dual potentials usable as an optimality certificate.
"""

from dataclasses import dataclass
from typing import Any
from typing import Optional

import numpy as np
import numpy.typing as npt
import ot
import structlog

from vqar.core.grid import SphericalGrid
from vqar.core.kernel import WeightedSample
from vqar.errors import DegenerateRowError
from vqar.errors import InfeasibleMarginalsError
from vqar.errors import NonfiniteInputError
from vqar.errors import SolverFailureError

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.intp]

MARGINAL_TOL = 1e-9
MONOTONE_TOL = 1e-9
# sample weights below this are pruned before solving
WEIGHT_FLOOR = 1e-15
MAX_SIMPLEX_ITER = 10_000_000
_OPTIMAL = 1


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Sparse coupling between k gridpoints and m sample atoms."""

    rows: IndexArray
    cols: IndexArray
    mass: FloatArray
    row_marginals: FloatArray
    col_marginals: FloatArray
    cost: float
    row_potential: Optional[FloatArray] = None
    col_potential: Optional[FloatArray] = None

    @property
    def k(self) -> int:
        return int(self.row_marginals.shape[0])

    @property
    def m(self) -> int:
        return int(self.col_marginals.shape[0])

    @property
    def n_entries(self) -> int:
        return int(self.mass.shape[0])

    def dense(self) -> FloatArray:
        out = np.zeros((self.k, self.m))
        np.add.at(out, (self.rows, self.cols), self.mass)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "m": self.m,
            "cost": self.cost,
            "entries": [
                [int(i), int(j), float(w)]
                for i, j, w in zip(self.rows, self.cols, self.mass)
            ],
        }


@dataclass(frozen=True, eq=False)
class QuantileMap:
    """Gridpoint images Q(u_i): the fitted predictive quantile function.

    `x` is the conditioning point, None for unconditional estimates.
    """

    grid: SphericalGrid
    images: FloatArray
    x: Optional[FloatArray]
    source: Optional[WeightedSample] = None

    @property
    def median(self) -> FloatArray:
        return np.asarray(self.images[self.grid.origin_index])

    @property
    def mean(self) -> FloatArray:
        """Grid-measure average of the images."""
        return np.asarray(self.images.mean(axis=0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": None if self.x is None else self.x.tolist(),
            "grid": self.grid.to_dict(),
            "images": self.images.tolist(),
        }


@dataclass(frozen=True)
class MonotoneReport:
    """Worst pairwise violation of <Q(u_s) - Q(u_r), u_s - u_r> >= 0."""

    max_violation: float
    pair: Optional[tuple[int, int]]

    @property
    def clean(self) -> bool:
        return self.max_violation <= MONOTONE_TOL


def cost_matrix(source: FloatArray, target: FloatArray) -> FloatArray:
    """1/2 squared Euclidean distances."""
    return 0.5 * ot.dist(source, target, metric="sqeuclidean")


def solve_transport(grid_measure: WeightedSample, sample: WeightedSample) -> TransportPlan:
    """Exact optimal basic plan of the transportation LP.

    Column indices refer to the atoms of `sample` as given; atoms pruned for
    carrying less than WEIGHT_FLOOR mass keep a zero column marginal.
    """
    if not (np.all(np.isfinite(grid_measure.atoms)) and np.all(np.isfinite(sample.atoms))):
        raise NonfiniteInputError("transport atoms")
    if not (np.all(np.isfinite(grid_measure.weights)) and np.all(np.isfinite(sample.weights))):
        raise NonfiniteInputError("transport weights")

    a_mass = float(grid_measure.weights.sum())
    b_mass = float(sample.weights.sum())
    if abs(a_mass - b_mass) > MARGINAL_TOL:
        raise InfeasibleMarginalsError(a_mass, b_mass)

    kept = np.flatnonzero(sample.weights >= WEIGHT_FLOOR)
    if kept.size == 0:
        raise InfeasibleMarginalsError(a_mass, 0.0)
    a = np.ascontiguousarray(grid_measure.weights, dtype=np.float64)
    b = sample.weights[kept]
    b = b * (a.sum() / b.sum())
    M = cost_matrix(grid_measure.atoms, sample.atoms[kept])

    # POT also raises its warnings through the warnings module, routed to logging
    G, log = ot.emd(a, b, M, numItermax=MAX_SIMPLEX_ITER, log=True)

    if log.get("result_code", _OPTIMAL) != _OPTIMAL:
        raise SolverFailureError(
            str(log.get("warning") or "non-optimal basis"),
            {"k": int(a.size), "m": int(kept.size), "result_code": log.get("result_code")},
        )
    if log.get("warning"):
        logger.warning("transport.solver_warning", message=str(log["warning"]))

    G = np.asarray(G, dtype=np.float64)
    rows, cols_kept = np.nonzero(G > 0.0)
    mass = G[rows, cols_kept]
    col_marginals = np.zeros(sample.size)
    col_marginals[kept] = G.sum(axis=0)

    plan = TransportPlan(
        rows=rows.astype(np.intp),
        cols=kept[cols_kept].astype(np.intp),
        mass=mass,
        row_marginals=G.sum(axis=1),
        col_marginals=col_marginals,
        cost=float(np.sum(mass * M[rows, cols_kept])),
        row_potential=np.asarray(log["u"], dtype=np.float64),
        col_potential=_expand(np.asarray(log["v"], dtype=np.float64), kept, sample.size),
    )
    logger.debug(
        "transport.solved", k=plan.k, m=plan.m, entries=plan.n_entries, cost=plan.cost
    )
    return plan


def _expand(values: FloatArray, kept: IndexArray, size: int) -> FloatArray:
    out = np.full(size, np.nan)
    out[kept] = values
    return out


def barycentric_map(
    plan: TransportPlan,
    sample: WeightedSample,
    grid: SphericalGrid,
    x: Optional[Any] = None,
) -> QuantileMap:
    """Q(u_i) = k * sum_j pi_ij x_j."""
    empty = np.flatnonzero(plan.row_marginals <= 0.0)
    if empty.size:
        raise DegenerateRowError(int(empty[0]))
    images = np.zeros((grid.k, sample.dim))
    np.add.at(images, plan.rows, plan.mass[:, None] * sample.atoms[plan.cols])
    images *= grid.k
    x_arr = None if x is None else np.asarray(x, dtype=np.float64).reshape(-1)
    return QuantileMap(grid=grid, images=images, x=x_arr, source=sample)


def check_monotone(qmap: QuantileMap) -> MonotoneReport:
    """Exhaustive scan over gridpoint pairs."""
    Q = qmap.images
    U = qmap.grid.points
    cross = Q @ U.T
    diag = np.diag(cross)
    inner = diag[:, None] + diag[None, :] - cross - cross.T
    flat = int(np.argmin(inner))
    worst = float(-inner.flat[flat])
    if worst <= MONOTONE_TOL:
        return MonotoneReport(max_violation=max(worst, 0.0), pair=None)
    r, s = np.unravel_index(flat, inner.shape)
    return MonotoneReport(max_violation=worst, pair=(int(r), int(s)))


# ---- certificates ----


def optimality_gap(
    plan: TransportPlan, grid_measure: WeightedSample, sample: WeightedSample
) -> tuple[float, float]:
    """(complementary slackness residual, dual infeasibility) of the plan.

    Both are zero up to rounding for an optimal basic solution.
    """
    if plan.row_potential is None or plan.col_potential is None:
        raise ValueError("plan carries no dual potentials")
    kept = np.flatnonzero(np.isfinite(plan.col_potential))
    M = cost_matrix(grid_measure.atoms, sample.atoms[kept])
    reduced = M - plan.row_potential[:, None] - plan.col_potential[kept][None, :]
    position = np.full(sample.size, -1)
    position[kept] = np.arange(kept.size)
    slack = float(np.max(np.abs(reduced[plan.rows, position[plan.cols]]), initial=0.0))
    infeasible = float(max(0.0, -reduced.min()))
    return slack, infeasible


def support_monotonicity(
    plan: TransportPlan, grid_measure: WeightedSample, sample: WeightedSample
) -> float:
    """Worst -<x_j1 - x_j2, u_i1 - u_i2> over pairs of support entries."""
    U = grid_measure.atoms[plan.rows]
    X = sample.atoms[plan.cols]
    cross = X @ U.T
    diag = np.diag(cross)
    inner = diag[:, None] + diag[None, :] - cross - cross.T
    return float(max(0.0, -inner.min()))


def cyclic_violation(
    plan: TransportPlan,
    grid_measure: WeightedSample,
    sample: WeightedSample,
    n_cycles: int = 1000,
    seed: int = 0,
) -> float:
    """Worst gain from rerouting random 3-cycles of support entries."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, plan.n_entries, size=(n_cycles, 3))
    U = grid_measure.atoms[plan.rows[picks]]
    X = sample.atoms[plan.cols[picks]]
    kept = np.einsum("nad,nad->n", U, X)
    shifted = np.einsum("nad,nad->n", U, np.roll(X, -1, axis=1))
    return float(max(0.0, (shifted - kept).max(initial=0.0)))
