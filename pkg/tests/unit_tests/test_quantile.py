"""
Contours, medians, regions and diagnostics of fitted quantile maps.
"""

import numpy as np
import pytest

from vqar.core.estimator import QuantileEstimator
from vqar.core.grid import build_grid
from vqar.core.grid import grid_measure
from vqar.core.kernel import WeightedSample
from vqar.core.quantile import ContourSet
from vqar.core.quantile import contour
from vqar.core.quantile import contours
from vqar.core.quantile import coverage_rate
from vqar.core.quantile import coverage_table
from vqar.core.quantile import evaluation_indices
from vqar.core.quantile import is_simple_polygon
from vqar.core.quantile import level_vertices
from vqar.core.quantile import median
from vqar.core.quantile import nesting_report
from vqar.core.quantile import nonconvexity
from vqar.core.quantile import point_in_polygon
from vqar.core.quantile import points_on_contour
from vqar.core.quantile import polygon_area
from vqar.core.quantile import quantile_mse
from vqar.core.quantile import region_contains
from vqar.core.simulate import simulate
from vqar.core.transport import QuantileMap
from vqar.core.transport import barycentric_map
from vqar.core.transport import solve_transport
from vqar.errors import DimensionUnsupportedError
from vqar.errors import GridMismatchError
from vqar.errors import InsufficientDataError
from vqar.errors import TauOutOfRangeError
from vqar.models.config import FitConfig
from vqar.models.config import GridConfig
from vqar.models.config import KernelSpec
from vqar.models.config import SimConfig

SMALL_FIT = FitConfig(grid=GridConfig(k_R=4, k_S=8), kernel=KernelSpec(ell=0.5))


def _identity(k_R=2, k_S=4, d=2):
    grid = build_grid(d, k_R, k_S)
    return QuantileMap(grid=grid, images=np.array(grid.points), x=None)


def _unit_directions(k_S):
    angles = 2 * np.pi * np.arange(k_S) / k_S
    return np.column_stack([np.cos(angles), np.sin(angles)])


@pytest.fixture(scope="module")
def case1_series():
    return simulate(SimConfig(case=1, T=2000, T0=200, seed=1))


class TestContours:
    """Level sets of the identity map are circles of radius tau"""

    @pytest.mark.parametrize("tau", [1 / 3, 2 / 3])
    def test_on_ring(self, tau):
        poly = contour(_identity(), tau)
        np.testing.assert_allclose(poly, tau * _unit_directions(4), atol=1e-12)

    def test_between_rings(self):
        poly = contour(_identity(), 0.5)
        np.testing.assert_allclose(poly, 0.5 * _unit_directions(4), atol=1e-12)

    def test_inside_first_ring(self):
        poly = contour(_identity(), 1 / 6)
        np.testing.assert_allclose(poly, _unit_directions(4) / 6, atol=1e-12)

    def test_beyond_outer_ring_extrapolates(self):
        poly = contour(_identity(), 0.9)
        np.testing.assert_allclose(poly, 0.9 * _unit_directions(4), atol=1e-12)

    def test_vertex_count_and_order(self):
        qmap = _identity(k_R=3, k_S=10)
        poly = contour(qmap, 0.5)
        assert poly.shape == (10, 2)
        angles = np.mod(np.arctan2(poly[:, 1], poly[:, 0]), 2 * np.pi)
        assert np.all(np.diff(angles) > 0)

    def test_rejects_tau_out_of_range(self):
        for tau in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(TauOutOfRangeError):
                contour(_identity(), tau)

    def test_contour_requires_plane(self):
        with pytest.raises(DimensionUnsupportedError, match="d=2"):
            contour(_identity(d=3, k_S=6), 0.5)

    def test_level_vertices_any_dimension(self):
        qmap = _identity(k_R=3, k_S=6, d=3)
        vertices = level_vertices(qmap, 0.5)
        np.testing.assert_allclose(np.linalg.norm(vertices, axis=1), 0.5, atol=1e-12)

    def test_contour_set_serialization(self):
        cs = contours(_identity(k_R=3, k_S=6), [0.25, 0.5], monotone_max_violation=0.0)
        restored = ContourSet.from_dict(cs.to_dict())
        assert restored.taus == [0.25, 0.5]
        np.testing.assert_array_equal(restored.contours[1], cs.contours[1])
        assert restored.monotone_max_violation == 0.0
        rows = cs.rows()
        assert len(rows) == 2 * 6
        assert rows[0][:2] == (0.25, 0)

    def test_empty_tau_list_keeps_median(self):
        cs = contours(_identity(), [])
        assert cs.contours == []
        np.testing.assert_array_equal(cs.median, [0.0, 0.0])


class TestMedian:
    def test_single_atom(self):
        grid = build_grid(2, 3, 5)
        sample = WeightedSample(atoms=np.array([[2.0, 3.0]]), weights=np.array([1.0]))
        qmap = barycentric_map(solve_transport(grid_measure(grid), sample), sample, grid)
        np.testing.assert_allclose(median(qmap), [2.0, 3.0], atol=1e-12)
        np.testing.assert_allclose(qmap.images, np.tile([2.0, 3.0], (grid.k, 1)), atol=1e-12)

    def test_symmetric_sample(self):
        grid = build_grid(2, 1, 2)
        atoms = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        sample = WeightedSample(atoms=atoms, weights=grid_measure(grid).weights)
        qmap = barycentric_map(solve_transport(grid_measure(grid), sample), sample, grid)
        np.testing.assert_allclose(median(qmap), [0.0, 0.0], atol=1e-12)

    def test_two_atoms_split_origin_evenly(self):
        grid = build_grid(2, 1, 2)
        a = np.array([1.5, 0.5])
        sample = WeightedSample(atoms=np.array([-a, a]), weights=np.array([0.5, 0.5]))
        qmap = barycentric_map(solve_transport(grid_measure(grid), sample), sample, grid)
        np.testing.assert_allclose(qmap.images[0], a, atol=1e-12)
        np.testing.assert_allclose(qmap.images[1], -a, atol=1e-12)
        np.testing.assert_allclose(median(qmap), [0.0, 0.0], atol=1e-12)


class TestRegions:
    def test_identity_region(self):
        qmap = _identity(k_R=4, k_S=16)
        assert region_contains(qmap, 0.5, [0.1, 0.1])
        assert not region_contains(qmap, 0.5, [0.6, 0.0])
        assert region_contains(qmap, 0.8, [0.6, 0.0])

    def test_vertex_counts_as_inside(self):
        qmap = _identity(k_R=4, k_S=16)
        vertex = contour(qmap, 0.4)[3]
        assert region_contains(qmap, 0.4, vertex)

    def test_higher_dimension_radial(self):
        qmap = _identity(k_R=3, k_S=40, d=3)
        assert region_contains(qmap, 0.5, [0.1, 0.0, 0.1])
        assert not region_contains(qmap, 0.5, [0.0, 0.0, 0.95])

    def test_point_in_square(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        assert point_in_polygon([0.5, 0.5], square)
        assert point_in_polygon([1.0, 0.5], square)
        assert not point_in_polygon([1.5, 0.5], square)
        assert not point_in_polygon([0.5, -0.01], square)


class TestPolygonDiagnostics:
    def test_area(self):
        square = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        assert polygon_area(square) == pytest.approx(4.0)
        assert polygon_area(square[::-1]) == pytest.approx(4.0)

    def test_bowtie_is_not_simple(self):
        bowtie = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        assert not is_simple_polygon(bowtie)
        assert is_simple_polygon(_unit_directions(7))

    def test_nonconvexity(self):
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        assert nonconvexity(square) == pytest.approx(0.0, abs=1e-12)
        ell = np.array([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], dtype=float)
        assert nonconvexity(ell) == pytest.approx(3.5 / 3.0 - 1.0)

    def test_nesting_report(self):
        cs = contours(_identity(k_R=4, k_S=12), [0.8, 0.2, 0.5])
        report = nesting_report(cs)
        assert [(e["tau_inner"], e["tau_outer"]) for e in report] == [(0.2, 0.5), (0.5, 0.8)]
        assert all(e["area_ordered"] and e["outer_simple"] and e["vertices_nested"] for e in report)

    def test_points_on_contour(self):
        qmap = _identity(k_R=4, k_S=16)
        picks = points_on_contour(qmap, 0.4, count=4)
        np.testing.assert_allclose(picks, 0.4 * _unit_directions(16)[[0, 4, 8, 12]], atol=1e-12)


class TestQuantileMSE:
    def test_self_is_zero(self):
        qmap = _identity()
        assert quantile_mse(qmap, qmap) == 0.0

    def test_constant_shift(self):
        qmap = _identity(k_R=4, k_S=8)
        moved = QuantileMap(grid=qmap.grid, images=qmap.images + [1.0, 2.0], x=None)
        assert quantile_mse(moved, qmap) == pytest.approx(5.0)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            quantile_mse(_identity(k_R=2), _identity(k_R=3))


class TestCoverage:
    """Leave-one-out coverage on a simulated series"""

    def test_evaluation_indices(self):
        idx = evaluation_indices(1001, 0.05, seed=3)
        assert idx.size == 50
        assert np.all(np.diff(idx) > 0)
        assert idx.min() >= 0 and idx.max() <= 999
        np.testing.assert_array_equal(idx, evaluation_indices(1001, 0.05, seed=3))

    def test_rates_increase_with_order(self, case1_series):
        estimator = QuantileEstimator(case1_series, SMALL_FIT)
        idx = evaluation_indices(len(case1_series), 0.05, seed=0)
        table = coverage_table(estimator, [0.2, 0.8], idx)
        assert table[0.8] > table[0.2] + 0.25
        assert 0.0 <= table[0.2] <= 1.0

    def test_deterministic(self, case1_series):
        a = coverage_rate(case1_series, 0.5, SMALL_FIT, eval_fraction=0.02)
        b = coverage_rate(case1_series, 0.5, SMALL_FIT, eval_fraction=0.02)
        assert a == b

    def test_translation_invariant(self, case1_series):
        idx = evaluation_indices(len(case1_series), 0.02, seed=0)
        base = coverage_rate(case1_series, 0.5, SMALL_FIT, eval_indices=idx)
        moved = coverage_rate(case1_series + [10.0, -4.0], 0.5, SMALL_FIT, eval_indices=idx)
        assert moved == pytest.approx(base, abs=0.05)

    def test_largest_ring_covers_most(self, case1_series):
        fine = FitConfig(grid=GridConfig(k_R=31, k_S=16), kernel=KernelSpec(ell=0.5))
        outer = build_grid(2, 31, 16).ring_radii[-1]
        assert outer == pytest.approx(31 / 32)
        assert coverage_rate(case1_series, float(outer), fine) > 0.9

    def test_short_series_rejected(self, case1_series):
        with pytest.raises(InsufficientDataError, match="at least 500"):
            coverage_rate(case1_series[:100], 0.5, SMALL_FIT)

    def test_rejects_bad_tau(self, case1_series):
        with pytest.raises(TauOutOfRangeError):
            coverage_rate(case1_series, 1.0, SMALL_FIT)
