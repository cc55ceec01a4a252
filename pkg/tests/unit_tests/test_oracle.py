"""
Reference answers: chi-square quantiles, the case-1 Gaussian region,
simulation oracles and brute-force transport.
"""

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from scipy import stats

from vqar.core.grid import build_grid
from vqar.core.grid import grid_measure
from vqar.core.kernel import WeightedSample
from vqar.core.oracle import brute_force_transport
from vqar.core.oracle import case1_oracle_map
from vqar.core.oracle import case1_region
from vqar.core.oracle import chi2_quantile
from vqar.core.oracle import oracle_map_from_sample
from vqar.core.oracle import radial_deviation
from vqar.core.oracle import sim_oracle_map
from vqar.core.quantile import contour
from vqar.core.quantile import quantile_mse
from vqar.core.simulate import transition
from vqar.core.transport import solve_transport
from vqar.errors import DegenerateScaleError
from vqar.errors import DimensionUnsupportedError
from vqar.errors import InvalidCountError
from vqar.errors import InvalidDimensionError
from vqar.errors import SizeExceededError
from vqar.errors import TauOutOfRangeError


class TestChi2Quantile:
    def test_closed_form_values(self):
        assert chi2_quantile(2, 0.5) == pytest.approx(1.386294, abs=1e-6)
        assert chi2_quantile(2, 0.8) == pytest.approx(3.218876, abs=1e-6)

    def test_small_tau_near_zero(self):
        assert chi2_quantile(2, 1e-12) < 1e-10

    @pytest.mark.parametrize("d", [1, 3, 4, 7, 20])
    @pytest.mark.parametrize("tau", [0.05, 0.3, 0.5, 0.9, 0.999])
    def test_matches_scipy(self, d, tau):
        assert chi2_quantile(d, tau) == pytest.approx(stats.chi2.ppf(tau, d), rel=1e-9)

    @given(
        d=st.integers(min_value=1, max_value=10),
        taus=st.lists(st.floats(min_value=0.001, max_value=0.999), min_size=2, max_size=2, unique=True),
    )
    @settings(max_examples=50, deadline=None)
    def test_increasing(self, d, taus):
        lo, hi = sorted(taus)
        assume(hi - lo > 1e-6)
        assert chi2_quantile(d, lo) < chi2_quantile(d, hi)

    def test_errors(self):
        with pytest.raises(InvalidDimensionError):
            chi2_quantile(0, 0.5)
        with pytest.raises(TauOutOfRangeError):
            chi2_quantile(2, 1.0)


class TestCase1Region:
    """Exact Gaussian prediction disc"""

    def test_worked_example(self):
        region = case1_region([3.0, 4.0], 0.5)
        np.testing.assert_allclose(region.center, [7 / 3, np.sqrt(30) / 2])
        assert region.scale == pytest.approx(1.0)
        assert region.radius_sq == pytest.approx(1.386294, abs=1e-6)

    def test_degenerate_at_origin(self):
        with pytest.raises(DegenerateScaleError):
            case1_region([0.0, 0.0], 0.5)

    def test_degenerate_on_circle_of_radius_ten(self):
        with pytest.raises(DegenerateScaleError):
            case1_region([6.0, 8.0], 0.5)

    def test_boundary_points(self):
        region = case1_region([1.0, 2.0], 0.4)
        pts = region.boundary(12)
        np.testing.assert_allclose(np.linalg.norm(pts - region.center, axis=1), region.radius)
        assert radial_deviation(pts, region) == pytest.approx(0.0, abs=1e-20)

    def test_membership_probability(self):
        x = np.array([3.0, 4.0])
        draws = transition(1, x, 200_000, np.random.default_rng(0))
        for tau in (0.2, 0.5, 0.8):
            rate = case1_region(x, tau).contains(draws).mean()
            # binomial sd at n=2e5 is at most 0.0012
            assert rate == pytest.approx(tau, abs=0.005)


class TestOracleMaps:
    def test_case1_map_sits_on_discs(self):
        grid = build_grid(2, 4, 12)
        x = [1.0, -2.0]
        qmap = case1_oracle_map(x, grid)
        np.testing.assert_allclose(qmap.median, case1_region(x, 0.5).center)
        for j, r in enumerate(grid.ring_radii, start=1):
            region = case1_region(x, float(r))
            assert radial_deviation(qmap.images[grid.ring(j)], region) < 1e-20
            assert radial_deviation(contour(qmap, float(r)), region) < 1e-20

    def test_case1_map_needs_plane(self):
        with pytest.raises(DimensionUnsupportedError):
            case1_oracle_map([1.0, 1.0], build_grid(3, 2, 4))

    def test_case2_mean_at_origin(self):
        grid = build_grid(2, 3, 8)
        qmap = sim_oracle_map(2, [0.0, 0.0], 1000, grid, seed=1)
        # zero noise scale at the origin
        np.testing.assert_allclose(qmap.mean, [-0.5, 1.0], atol=1e-12)
        np.testing.assert_allclose(qmap.median, [-0.5, 1.0], atol=1e-12)

    def test_case2_mean_away_from_origin(self):
        grid = build_grid(2, 4, 8)
        qmap = sim_oracle_map(2, [1.0, 1.0], 20_000, grid, seed=2)
        # scale sqrt(2)/2, uniform noise sd 1/sqrt(3)
        se = (np.sqrt(2) / 2) / np.sqrt(3) / np.sqrt(20_000)
        np.testing.assert_allclose(qmap.mean, [0.26159, 0.97815], atol=4 * se + 1e-5)

    def test_case3_angle_changes_map(self):
        grid = build_grid(2, 2, 8)
        plain = sim_oracle_map(3, [0.5, 0.5], 2000, grid, seed=3)
        turned = sim_oracle_map(3, [0.5, 0.5], 2000, grid, seed=3, angle=np.pi / 3)
        assert quantile_mse(plain, turned) > 0.0

    def test_two_seeds_close(self):
        grid = build_grid(2, 3, 8)
        a = sim_oracle_map(2, [1.0, 0.5], 20_000, grid, seed=0)
        b = sim_oracle_map(2, [1.0, 0.5], 20_000, grid, seed=1)
        assert quantile_mse(a, b) < 0.01

    def test_rejects_fewer_draws_than_gridpoints(self):
        grid = build_grid(2, 3, 8)
        with pytest.raises(InvalidCountError, match="N=24"):
            sim_oracle_map(2, [0.0, 0.0], 24, grid)

    def test_identity_recovered_from_grid_atoms(self):
        grid = build_grid(2, 3, 6)
        qmap = oracle_map_from_sample(np.array(grid.points), grid)
        np.testing.assert_allclose(qmap.images, grid.points, atol=1e-12)


class TestBruteForce:
    def test_two_by_two(self):
        source = WeightedSample(atoms=np.array([[-0.5, 0.0], [0.5, 0.0]]), weights=np.array([0.5, 0.5]))
        sample = WeightedSample(atoms=np.array([[-1.0, 0.0], [1.0, 0.0]]), weights=np.array([0.5, 0.5]))
        plan = brute_force_transport(source, sample)
        assert plan.cost == pytest.approx(0.125, abs=1e-12)
        assert plan.cost == pytest.approx(solve_transport(source, sample).cost, abs=1e-12)

    def test_single_row(self):
        source = WeightedSample(atoms=np.zeros((1, 2)), weights=np.array([1.0]))
        atoms = np.array([[1.0, 0.0], [0.0, 2.0], [-3.0, 0.0]])
        sample = WeightedSample(atoms=atoms, weights=np.array([0.2, 0.3, 0.5]))
        plan = brute_force_transport(source, sample)
        np.testing.assert_allclose(plan.dense(), [[0.2, 0.3, 0.5]], atol=1e-12)

    def test_uniform_four_by_four(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            atoms = rng.standard_normal((4, 2))
            weights = np.full(4, 0.25)
            source = WeightedSample(atoms=rng.standard_normal((4, 2)), weights=weights)
            sample = WeightedSample(atoms=atoms, weights=weights)
            exact = brute_force_transport(source, sample)
            assert exact.cost == pytest.approx(solve_transport(source, sample).cost, abs=1e-9)

    def test_size_limit(self):
        big = grid_measure(build_grid(2, 1, 4))
        small = WeightedSample(atoms=np.zeros((1, 2)), weights=np.array([1.0]))
        with pytest.raises(SizeExceededError, match="5x1"):
            brute_force_transport(big, small)
