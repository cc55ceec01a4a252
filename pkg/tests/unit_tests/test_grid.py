"""
Reference grid on the unit ball and its uniform measure.
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from vqar.core.grid import SphericalGrid
from vqar.core.grid import build_grid
from vqar.core.grid import grid_from_config
from vqar.core.grid import grid_measure
from vqar.errors import InvalidCountError
from vqar.errors import InvalidDimensionError
from vqar.models.config import GridConfig


class TestBuildGrid:
    """Layout: ring-major, origin last"""

    def test_nine_point_grid(self):
        grid = build_grid(2, 2, 4, seed=0)
        assert grid.k == 9
        assert grid.points.shape == (9, 2)
        np.testing.assert_array_equal(grid.points[-1], [0.0, 0.0])
        np.testing.assert_allclose(grid.ring_radii, [1 / 3, 2 / 3])
        expected_ring1 = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]]) / 3
        np.testing.assert_allclose(grid.points[grid.ring(1)], expected_ring1, atol=1e-15)
        np.testing.assert_allclose(grid.points[grid.ring(2)], 2 * expected_ring1, atol=1e-15)

    def test_minimal_grid(self):
        grid = build_grid(2, 1, 1, seed=0)
        np.testing.assert_allclose(grid.points, [[0.5, 0.0], [0.0, 0.0]])
        assert grid.origin_index == 1

    def test_high_dimension_directions_balanced(self):
        grid = build_grid(3, 2, 100, seed=7)
        assert grid.k == 201
        assert np.linalg.norm(grid.directions.mean(axis=0)) < 0.2
        np.testing.assert_allclose(np.linalg.norm(grid.directions, axis=1), 1.0, atol=1e-12)

    def test_one_dimension_uses_both_signs(self):
        grid = build_grid(1, 3, 2)
        np.testing.assert_array_equal(grid.directions, [[1.0], [-1.0]])
        assert grid.k == 7

    def test_one_dimension_rejects_other_direction_counts(self):
        with pytest.raises(InvalidCountError, match="k_S"):
            build_grid(1, 3, 3)

    def test_rejects_zero_dimension(self):
        with pytest.raises(InvalidDimensionError, match="Invalid dimension"):
            build_grid(0, 2, 2)

    def test_rejects_zero_rings(self):
        with pytest.raises(InvalidCountError, match="k_R"):
            build_grid(2, 0, 4)

    def test_rejects_zero_directions(self):
        with pytest.raises(InvalidCountError, match="k_S"):
            build_grid(2, 3, 0)

    def test_deterministic(self):
        a = build_grid(4, 3, 20, seed=11)
        b = build_grid(4, 3, 20, seed=11)
        np.testing.assert_array_equal(a.points, b.points)
        assert a.same_as(b)

    def test_seed_ignored_in_two_dimensions(self):
        assert build_grid(2, 3, 5, seed=1).same_as(build_grid(2, 3, 5, seed=99))

    def test_points_read_only(self):
        grid = build_grid(2, 2, 4)
        with pytest.raises(ValueError):
            grid.points[0, 0] = 1.0

    def test_from_config(self):
        grid = grid_from_config(GridConfig(d=2, k_R=3, k_S=6))
        assert grid.k == 19

    def test_round_trip_dict(self):
        grid = build_grid(3, 2, 5, seed=3)
        restored = SphericalGrid.from_dict(grid.to_dict())
        assert restored.same_as(grid)

    def test_angle_order_starts_at_zero(self):
        grid = build_grid(2, 1, 6)
        assert list(grid.angle_order()) == [0, 1, 2, 3, 4, 5]


class TestGridInvariants:
    """Properties that hold for every grid"""

    @given(
        d=st.integers(min_value=2, max_value=5),
        k_R=st.integers(min_value=1, max_value=8),
        k_S=st.integers(min_value=1, max_value=12),
        seed=st.integers(min_value=0, max_value=1000),
    )
    @settings(max_examples=40, deadline=None)
    def test_radial_quantization(self, d, k_R, k_S, seed):
        grid = build_grid(d, k_R, k_S, seed)
        norms = np.linalg.norm(grid.points[:-1], axis=1)
        scaled = (k_R + 1) * norms
        np.testing.assert_allclose(scaled, np.round(scaled), atol=1e-12)
        assert np.all((np.round(scaled) >= 1) & (np.round(scaled) <= k_R))
        assert np.all(np.linalg.norm(grid.points, axis=1) < 1.0)

    @given(k_S=st.integers(min_value=2, max_value=64))
    @settings(max_examples=30, deadline=None)
    def test_planar_directions_sum_to_zero(self, k_S):
        grid = build_grid(2, 1, k_S)
        assert np.linalg.norm(grid.directions.sum(axis=0)) < 1e-10


class TestGridMeasure:
    """Uniform weights on the gridpoints"""

    def test_nine_weights(self):
        measure = grid_measure(build_grid(2, 2, 4))
        np.testing.assert_allclose(measure.weights, np.full(9, 1 / 9), rtol=1e-12)

    def test_two_weights(self):
        measure = grid_measure(build_grid(2, 1, 1))
        np.testing.assert_allclose(measure.weights, [0.5, 0.5])

    @given(k_R=st.integers(min_value=1, max_value=20), k_S=st.integers(min_value=1, max_value=30))
    @settings(max_examples=40, deadline=None)
    def test_sums_to_one(self, k_R, k_S):
        measure = grid_measure(build_grid(2, k_R, k_S))
        assert abs(measure.weights.sum() - 1.0) < 1e-15
        assert np.all(measure.weights > 0)
