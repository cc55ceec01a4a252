"""
Ground truth for validating fits: the closed-form Gaussian region of case 1,
chi-square quantiles, simulation oracles for cases 2-3, and brute-force
transport on tiny instances.
"""

import itertools
from dataclasses import dataclass
from typing import Any
from typing import Optional

import numpy as np
import numpy.typing as npt
import structlog
from scipy.optimize import brentq
from scipy.special import gammainc

from vqar.core.grid import SphericalGrid
from vqar.core.grid import grid_measure as reference_measure
from vqar.core.kernel import WeightedSample
from vqar.core.simulate import drift
from vqar.core.simulate import noise_scale
from vqar.core.simulate import transition
from vqar.core.transport import QuantileMap
from vqar.core.transport import TransportPlan
from vqar.core.transport import barycentric_map
from vqar.core.transport import cost_matrix
from vqar.core.transport import solve_transport
from vqar.errors import DegenerateScaleError
from vqar.errors import DimensionUnsupportedError
from vqar.errors import InvalidCountError
from vqar.errors import InvalidDimensionError
from vqar.errors import SizeExceededError
from vqar.errors import TauOutOfRangeError

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

BRUTE_FORCE_LIMIT = 4
SCALE_FLOOR = 1e-12


def chi2_quantile(d: int, tau: float) -> float:
    """tau-quantile of the chi-square law with d degrees of freedom.

    Closed form -2 log(1 - tau) for d = 2; otherwise bisection (Brent) on the
    regularized lower incomplete gamma function.
    """
    if d < 1:
        raise InvalidDimensionError(d)
    if not 0.0 < tau < 1.0:
        raise TauOutOfRangeError(tau)
    if d == 2:
        return float(-2.0 * np.log1p(-tau))

    half = d / 2.0
    hi = d + 20.0 * np.sqrt(d) + 40.0
    while gammainc(half, hi / 2.0) < tau:
        hi *= 2.0
    return float(
        brentq(lambda q: gammainc(half, q / 2.0) - tau, 0.0, hi, xtol=1e-12, rtol=1e-14)
    )


@dataclass(frozen=True, eq=False)
class GaussianRegion:
    """{y : |y - center|^2 <= scale^2 chi2_{d,tau}}."""

    center: FloatArray
    scale: float
    tau: float
    d: int = 2

    @property
    def radius_sq(self) -> float:
        return self.scale**2 * chi2_quantile(self.d, self.tau)

    @property
    def radius(self) -> float:
        return float(np.sqrt(self.radius_sq))

    def contains(self, y: Any) -> Any:
        y = np.asarray(y, dtype=np.float64)
        return np.sum((y - self.center) ** 2, axis=-1) <= self.radius_sq

    def boundary(self, n: int) -> FloatArray:
        """n points on the circle at the grid angles 2 pi s / n."""
        angles = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.column_stack([np.cos(angles), np.sin(angles)])

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": self.center.tolist(),
            "scale": self.scale,
            "tau": self.tau,
            "radius_sq": self.radius_sq,
        }


def case1_region(x_t: Any, tau: float) -> GaussianRegion:
    """Exact conditional region of case 1 at x_t."""
    x = np.asarray(x_t, dtype=np.float64).reshape(2)
    v = float(noise_scale(1, x))
    if abs(v) < SCALE_FLOOR:
        raise DegenerateScaleError(v)
    if not 0.0 < tau < 1.0:
        raise TauOutOfRangeError(tau)
    return GaussianRegion(center=drift(1, x), scale=abs(v), tau=tau)


def case1_oracle_map(x_t: Any, grid: SphericalGrid) -> QuantileMap:
    """Exact case-1 quantile map at the gridpoints.

    Q(u|x) = g(x) + |v(x)| sqrt(chi2_{2,|u|}) u/|u|, and Q(0|x) = g(x).
    """
    if grid.d != 2:
        raise DimensionUnsupportedError("case1_oracle_map", grid.d)
    x = np.asarray(x_t, dtype=np.float64).reshape(2)
    center = drift(1, x)
    v = abs(float(noise_scale(1, x)))
    radii = grid.radii
    images = np.tile(center, (grid.k, 1))
    ring = radii > 0.0
    chi_r = np.sqrt(-2.0 * np.log1p(-radii[ring]))
    images[ring] += v * chi_r[:, None] * grid.points[ring] / radii[ring, None]
    return QuantileMap(grid=grid, images=images, x=x)


def radial_deviation(vertices: FloatArray, region: GaussianRegion) -> float:
    """Mean squared gap between vertex distances to the center and the radius."""
    dist = np.linalg.norm(np.asarray(vertices) - region.center, axis=1)
    return float(np.mean((dist - region.radius) ** 2))


def oracle_map_from_sample(
    atoms: FloatArray, grid: SphericalGrid, x: Optional[Any] = None
) -> QuantileMap:
    """Transport the grid onto the uniform empirical measure of atoms."""
    n = atoms.shape[0]
    weights = np.full(n, 1.0 / n)
    weights[-1] = 1.0 - weights[:-1].sum()
    sample = WeightedSample(atoms=atoms, weights=weights)
    plan = solve_transport(reference_measure(grid), sample)
    return barycentric_map(plan, sample, grid, x)


def sim_oracle_map(
    case: int,
    x_t: Any,
    N: int,
    grid: SphericalGrid,
    seed: int = 0,
    angle: float = 0.0,
) -> QuantileMap:
    """Benchmark map from N exact one-step transitions out of x_t.

    For case 3 the rotation is frozen at `angle`, the value at the evaluation time.
    """
    if N < grid.k:
        raise InvalidCountError("N", N, f"must be at least k={grid.k}")
    rng = np.random.default_rng(seed)
    x = np.asarray(x_t, dtype=np.float64).reshape(2)
    atoms = transition(case, x, N, rng, angle)
    logger.debug("oracle.simulated", case=case, N=N, x=x.tolist())
    return oracle_map_from_sample(atoms, grid, x)


# ---- brute force transport ----


def _plan_from_dense(G: FloatArray, cost: float) -> TransportPlan:
    rows, cols = np.nonzero(G > 1e-15)
    return TransportPlan(
        rows=rows.astype(np.intp),
        cols=cols.astype(np.intp),
        mass=G[rows, cols],
        row_marginals=G.sum(axis=1),
        col_marginals=G.sum(axis=0),
        cost=cost,
    )


def _is_uniform(w: FloatArray) -> bool:
    return bool(np.allclose(w, 1.0 / w.size, rtol=0.0, atol=1e-12))


def brute_force_transport(
    grid_measure: WeightedSample, sample: WeightedSample
) -> TransportPlan:
    """Exact optimum by enumeration for k, m <= 4.

    Equal-size uniform instances enumerate permutations; anything else
    enumerates every basis of the transportation polytope.
    """
    k, m = grid_measure.size, sample.size
    if k > BRUTE_FORCE_LIMIT or m > BRUTE_FORCE_LIMIT:
        raise SizeExceededError(k, m, BRUTE_FORCE_LIMIT)
    M = cost_matrix(grid_measure.atoms, sample.atoms)
    a, b = grid_measure.weights, sample.weights

    if k == m and _is_uniform(a) and _is_uniform(b):
        best_perm: Optional[tuple[int, ...]] = None
        best_cost = np.inf
        for perm in itertools.permutations(range(k)):
            c = float(M[np.arange(k), perm].sum()) / k
            if c < best_cost:
                best_cost, best_perm = c, perm
        assert best_perm is not None
        G = np.zeros((k, m))
        G[np.arange(k), best_perm] = a
        return _plan_from_dense(G, best_cost)

    # equality system: k row sums, m-1 column sums (one is redundant)
    n_vars = k * m
    A = np.zeros((k + m - 1, n_vars))
    for i in range(k):
        A[i, i * m : (i + 1) * m] = 1.0
    for j in range(m - 1):
        A[k + j, j::m] = 1.0
    rhs = np.concatenate([a, b[: m - 1]])
    c_flat = M.reshape(-1)

    best_x: Optional[FloatArray] = None
    best_cost = np.inf
    for basis in itertools.combinations(range(n_vars), k + m - 1):
        B = A[:, basis]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        xb = np.linalg.solve(B, rhs)
        if xb.min() < -1e-12:
            continue
        c = float(c_flat[list(basis)] @ xb)
        if c < best_cost:
            best_cost = c
            best_x = np.zeros(n_vars)
            best_x[list(basis)] = np.clip(xb, 0.0, None)
    assert best_x is not None
    return _plan_from_dense(best_x.reshape(k, m), best_cost)
