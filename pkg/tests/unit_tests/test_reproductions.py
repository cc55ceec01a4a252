"""
Full-scale Monte-Carlo reproductions. Minutes each; run with `pytest -m slow`.
"""

import numpy as np
import pytest

from vqar.core.estimator import QuantileEstimator
from vqar.core.kernel import WeightedSample
from vqar.core.oracle import brute_force_transport
from vqar.core.oracle import case1_oracle_map
from vqar.core.oracle import case1_region
from vqar.core.oracle import radial_deviation
from vqar.core.oracle import sim_oracle_map
from vqar.core.quantile import contour
from vqar.core.quantile import coverage_rate
from vqar.core.quantile import nonconvexity
from vqar.core.quantile import quantile_mse
from vqar.core.simulate import contraction_estimate
from vqar.core.simulate import noise_scale
from vqar.core.simulate import simulate
from vqar.core.transport import check_monotone
from vqar.core.transport import solve_transport
from vqar.models.config import FitConfig
from vqar.models.config import GridConfig
from vqar.models.config import KernelSpec
from vqar.models.config import SimConfig
from vqar.models.config import load_config
from vqar.models.enums import KernelKind

pytestmark = pytest.mark.slow

FULL_GRID = GridConfig(k_R=15, k_S=15)


def _ring(center, radius, n=8):
    angles = 2.0 * np.pi * np.arange(n) / n
    return np.asarray(center) + radius * np.column_stack([np.cos(angles), np.sin(angles)])


def _dirichlet(rng, n, d=2):
    return WeightedSample(atoms=rng.standard_normal((n, d)), weights=rng.dirichlet(np.ones(n)))


class TestSolverAgainstEnumeration:
    def test_five_hundred_tiny_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(500):
            k, m = (int(v) for v in rng.integers(1, 5, size=2))
            source, sample = _dirichlet(rng, k), _dirichlet(rng, m)
            exact = brute_force_transport(source, sample)
            assert solve_transport(source, sample).cost == pytest.approx(exact.cost, abs=1e-9)


class TestMonotoneFits:
    """End-to-end fits over all processes and a spread of bandwidths"""

    @pytest.mark.parametrize("case", [1, 2, 3])
    def test_every_fit_monotone(self, case):
        series = simulate(SimConfig(case=case, T=3000, T0=1000, seed=case))
        kernels = [
            KernelSpec(ell=0.1),
            KernelSpec(ell=0.5),
            KernelSpec(kind=KernelKind.GAUSSIAN, ell=0.3),
        ]
        rng = np.random.default_rng(case)
        for spec in kernels:
            est = QuantileEstimator(series, FitConfig(grid=GridConfig(k_R=6, k_S=10), kernel=spec))
            for t in rng.choice(len(series), size=23, replace=False):
                assert check_monotone(est.fit_at(series[t])).max_violation <= 1e-9


class TestGaussianRecovery:
    """Case 1 contours against the exact prediction disc"""

    def test_tau_04_radial_deviation(self):
        # near the bulk of the stationary law, far from |x| in {0, 10}
        points = _ring([0.7, 1.4], 0.3)
        fit = FitConfig(grid=FULL_GRID, kernel=KernelSpec(ell=0.5))
        scores = []
        for seed in range(5):
            series = simulate(SimConfig(case=1, T=40_000, seed=seed))
            est = QuantileEstimator(series, fit)
            for x in points:
                dev = radial_deviation(contour(est.fit_at(x), 0.4), case1_region(x, 0.4))
                scores.append(dev / float(noise_scale(1, x)) ** 2)
        assert np.mean(scores) <= 0.05


class TestCoverage:
    @pytest.mark.parametrize("seed", range(5))
    def test_leave_one_out_near_nominal(self, seed):
        series = simulate(SimConfig(case=1, T=20_000, seed=seed))
        fit = FitConfig(grid=FULL_GRID, kernel=KernelSpec(ell=0.5))
        for tau in (0.2, 0.4, 0.8):
            assert coverage_rate(series, tau, fit, seed=seed) == pytest.approx(tau, abs=0.05)


class TestContractionSeeds:
    @pytest.mark.parametrize("seed", range(10))
    def test_cases_one_and_two(self, seed):
        assert contraction_estimate(1, n_pairs=500, n_eps=2000, seed=seed) <= 0.72
        assert contraction_estimate(2, n_pairs=500, n_eps=2000, seed=seed) <= 0.95


class TestConsistencyTrend:
    """Case 1 fits approach the exact map as T grows with the growing grid schedule"""

    def test_mse_decreases_along_series_length(self):
        points = _ring([0.7, 1.4], 0.3)
        means = []
        for T in (5000, 20_000, 80_000):
            fit = load_config({"grid_schedule": "growing", "ell": 0.5}).fit_config(2, T)
            scores = []
            for seed in range(10):
                series = simulate(SimConfig(case=1, T=T, seed=seed))
                est = QuantileEstimator(series, fit)
                scores.extend(quantile_mse(est.fit_at(x), case1_oracle_map(x, est.grid)) for x in points)
            means.append(float(np.mean(scores)))
        assert means[0] > means[1] > means[2]


class TestNonconvexContours:
    """Clover innovations: fitted inner contours are non-convex where the truth is"""

    def test_case3_inner_contour_matches_oracle(self):
        series = simulate(SimConfig(case=3, T=80_000, seed=0, rotation_enabled=False))
        fine = FitConfig(grid=GridConfig(k_R=20, k_S=60), kernel=KernelSpec(ell=0.1))
        est = QuantileEstimator(series, fine)
        points = _ring([0.3, 0.5], 0.5)
        fitted, truth = [], []
        for n, x in enumerate(points):
            fitted.append(nonconvexity(contour(est.fit_at(x), 0.2)))
            oracle = sim_oracle_map(3, x, N=20_000, grid=est.grid, seed=n, angle=0.0)
            truth.append(nonconvexity(contour(oracle, 0.2)))
        assert sum(t >= 0.10 for t in truth) >= 6
        assert sum((f >= 0.10) == (t >= 0.10) for f, t in zip(fitted, truth)) >= 6
