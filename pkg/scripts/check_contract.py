"""
Import check for vqar's public surface. Run in CI before the test suite so a
broken module layout fails fast with a readable list.
"""

import os
import sys

_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _root not in sys.path:
    sys.path.insert(0, _root)

SURFACE = [
    ("vqar.models.config", ["VQARConfig", "GridConfig", "KernelSpec", "SimConfig", "FitConfig"]),
    ("vqar.models.enums", ["KernelKind", "GridSchedule", "SimCase"]),
    ("vqar.models.manifest", ["RunManifest"]),
    ("vqar.errors", ["VQARError", "DataError", "NumericalError", "EmptySupportError"]),
    ("vqar.core.grid", ["SphericalGrid", "build_grid", "grid_measure"]),
    ("vqar.core.kernel", ["WeightedSample", "nw_weights", "nw_weights_panel", "resolve_panel_bandwidth", "empirical_stationary"]),
    ("vqar.core.transport", ["solve_transport", "barycentric_map", "check_monotone"]),
    ("vqar.core.quantile", ["contour", "median", "region_contains", "coverage_rate", "quantile_mse"]),
    ("vqar.core.simulate", ["gen_case1", "gen_case2", "gen_case3", "contraction_estimate"]),
    ("vqar.core.oracle", ["chi2_quantile", "case1_region", "sim_oracle_map", "brute_force_transport"]),
    ("vqar.core.estimator", ["QuantileEstimator", "PanelQuantileEstimator"]),
    ("vqar.core.runner", ["FitRunner"]),
    ("vqar.adapters.store", ["ArtifactStore", "read_series_csv"]),
    ("vqar.adapters.svg", ["render_contours"]),
    ("vqar.ports.cli", ["cli"]),
]


def check_contracts() -> None:
    missing: list[str] = []
    for module_path, symbols in SURFACE:
        try:
            mod = __import__(module_path, fromlist=symbols)
        except ImportError as exc:
            missing.append(f"FAIL: cannot import {module_path}: {exc}")
            continue
        missing.extend(
            f"FAIL: {module_path} missing symbol '{sym}'" for sym in symbols if not hasattr(mod, sym)
        )

    if missing:
        for line in missing:
            print(line, file=sys.stderr)
        sys.exit(1)
    print(f"OK: {sum(len(s) for _, s in SURFACE)} symbols across {len(SURFACE)} modules")


if __name__ == "__main__":
    check_contracts()
