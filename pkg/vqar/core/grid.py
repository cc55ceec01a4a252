"""
Regular grid of the unit ball carrying the discretized spherical uniform.

k = k_R * k_S + 1 points: k_R rings of radius j/(k_R+1) along k_S unit
directions, plus the origin stored last.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
import structlog

from vqar.core.kernel import WeightedSample
from vqar.errors import InvalidCountError
from vqar.errors import InvalidDimensionError
from vqar.models.config import GridConfig

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class SphericalGrid:
    """Gridpoints of the unit ball, ring-major, origin last.

    Point (j-1)*k_S + s sits at radius j/(k_R+1) along directions[s].
    """

    d: int
    k_R: int
    k_S: int
    seed: int
    directions: FloatArray
    points: FloatArray

    @property
    def k(self) -> int:
        return self.k_R * self.k_S + 1

    @property
    def ring_radii(self) -> FloatArray:
        return np.arange(1, self.k_R + 1, dtype=np.float64) / (self.k_R + 1)

    @property
    def radii(self) -> FloatArray:
        """Radius of every gridpoint (0 for the origin)."""
        return np.append(np.repeat(self.ring_radii, self.k_S), 0.0)

    @property
    def origin_index(self) -> int:
        return self.k - 1

    def ring(self, j: int) -> slice:
        """Index slice of ring j (1-based)."""
        start = (j - 1) * self.k_S
        return slice(start, start + self.k_S)

    def angle_order(self) -> npt.NDArray[np.intp]:
        """Direction indices sorted by polar angle in [0, 2pi) (d=2)."""
        angles = np.mod(np.arctan2(self.directions[:, 1], self.directions[:, 0]), 2 * np.pi)
        return np.argsort(angles, kind="stable")

    def same_as(self, other: "SphericalGrid") -> bool:
        return (
            self.d == other.d
            and self.k_R == other.k_R
            and self.k_S == other.k_S
            and np.array_equal(self.points, other.points)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "k_R": self.k_R,
            "k_S": self.k_S,
            "seed": self.seed,
            "points": self.points.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SphericalGrid":
        grid = build_grid(data["d"], data["k_R"], data["k_S"], data.get("seed", 0))
        stored = np.asarray(data["points"], dtype=np.float64)
        if stored.shape != grid.points.shape or not np.allclose(stored, grid.points, atol=1e-15):
            logger.warning("grid.stored_points_differ", k=grid.k)
        return grid


def _directions(d: int, k_S: int, seed: int) -> FloatArray:
    if d == 1:
        if k_S != 2:
            raise InvalidCountError("k_S", k_S, "d=1 uses exactly the two directions +1 and -1")
        return np.array([[1.0], [-1.0]])
    if d == 2:
        angles = 2.0 * np.pi * np.arange(k_S) / k_S
        return np.column_stack([np.cos(angles), np.sin(angles)])
    # d >= 3: seeded uniform directions on the sphere
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((k_S, d))
    norms = np.linalg.norm(draws, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        draws[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(draws, axis=1)
    return draws / norms[:, None]


def build_grid(d: int, k_R: int, k_S: int, seed: int = 0) -> SphericalGrid:
    """Construct the k_R*k_S+1 point grid. Deterministic in (d, k_R, k_S, seed)."""
    if d < 1:
        raise InvalidDimensionError(d)
    if k_R < 1:
        raise InvalidCountError("k_R", k_R)
    if k_S < 1:
        raise InvalidCountError("k_S", k_S)

    directions = _directions(d, k_S, seed)
    radii = np.arange(1, k_R + 1, dtype=np.float64) / (k_R + 1)
    rings = radii[:, None, None] * directions[None, :, :]
    points = np.vstack([rings.reshape(k_R * k_S, d), np.zeros((1, d))])

    directions.setflags(write=False)
    points.setflags(write=False)
    return SphericalGrid(d=d, k_R=k_R, k_S=k_S, seed=seed, directions=directions, points=points)


def grid_from_config(cfg: GridConfig) -> SphericalGrid:
    return build_grid(cfg.d, cfg.k_R, cfg.k_S, cfg.seed)


def grid_measure(grid: SphericalGrid) -> WeightedSample:
    """Uniform weights 1/k; the last weight absorbs the rounding residual."""
    k = grid.k
    weights = np.full(k, 1.0 / k)
    weights[-1] = 1.0 - weights[:-1].sum()
    return WeightedSample(atoms=grid.points, weights=weights)
