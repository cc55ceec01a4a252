"""
Click-based CLI for vqar. Single file, one command group.
Testable with click.testing.CliRunner.

Every command resolves its configuration (defaults < settings YAML/env <
--config file < flags), writes its artifacts atomically under --out, and
records a manifest.json that `vqar rerun` replays.
"""

import functools
import logging
import sys
import time
from dataclasses import replace
from datetime import datetime
from datetime import timezone
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Optional
from typing import Sequence
from typing import TypeVar
from typing import Union

import click
import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog
import yaml
from prometheus_client import generate_latest

from vqar import __version__
from vqar import configure_logging
from vqar.adapters.store import ArtifactStore
from vqar.adapters.store import read_contours
from vqar.adapters.store import read_json
from vqar.adapters.store import read_panel
from vqar.adapters.store import read_series_csv
from vqar.adapters.svg import ContourGroup
from vqar.adapters.svg import render_contours
from vqar.core.estimator import PanelQuantileEstimator
from vqar.core.estimator import QuantileEstimator
from vqar.core.estimator import var1_mean_forecast
from vqar.core.grid import grid_from_config
from vqar.core.oracle import case1_oracle_map
from vqar.core.oracle import case1_region
from vqar.core.oracle import radial_deviation
from vqar.core.oracle import sim_oracle_map
from vqar.core.quantile import contour
from vqar.core.quantile import contours
from vqar.core.quantile import coverage_table
from vqar.core.quantile import evaluation_indices
from vqar.core.quantile import nesting_report
from vqar.core.quantile import points_on_contour
from vqar.core.quantile import quantile_mse
from vqar.core.runner import FitRunner
from vqar.core.runner import PointResult
from vqar.core.runner import PointTask
from vqar.core.simulate import CASE1_BOUND
from vqar.core.simulate import CASE2_BOUND
from vqar.core.simulate import contraction_estimate
from vqar.core.simulate import mixture_second_moment
from vqar.core.simulate import rotation_angle
from vqar.core.simulate import simulate as simulate_series
from vqar.core.transport import QuantileMap
from vqar.core.transport import check_monotone
from vqar.errors import ConfigurationError
from vqar.errors import InsufficientDataError
from vqar.errors import SolverFailureError
from vqar.errors import VQARError
from vqar.models.config import VQARConfig
from vqar.models.config import load_config
from vqar.models.enums import GridSchedule
from vqar.models.enums import KernelKind
from vqar.models.enums import SimCase
from vqar.models.manifest import RunManifest

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
F = TypeVar("F", bound=Callable[..., Any])

MANIFEST_NAME = "manifest.json"
FAILED_SOLVE_NAME = "failed_solve.json"
_OUT_KEY = "vqar.out_dir"

# flag name -> VQARConfig field
_FLAG_FIELDS = {
    "case": "case",
    "T": "T",
    "T0": "T0",
    "seed": "seed",
    "k_R": "k_R",
    "k_S": "k_S",
    "kernel": "kernel",
    "ell": "ell",
    "h": "h",
    "neighbors": "neighbors",
    "grid_schedule": "grid_schedule",
    "workers": "workers",
    "out": "out_dir",
    "eval_fraction": "eval_fraction",
    "oracle_samples": "oracle_samples",
}


# ---- configuration ----


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {what}: {text!r}")


def _parse_ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"cannot parse {what}: {text!r}")


def _read_config_file(path: str) -> dict[str, Any]:
    """YAML or JSON; sections are flattened like config/settings.yaml."""
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"unreadable config file {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigurationError(f"config file {path} must hold a mapping")
    flat: dict[str, Any] = {}
    for key, val in raw.items():
        if isinstance(val, dict):
            flat.update(val)
        else:
            flat[key] = val
    return flat


def _resolve(params: dict[str, Any]) -> VQARConfig:
    overrides: dict[str, Any] = {}
    if params.get("config_file"):
        overrides.update(_read_config_file(params["config_file"]))
    for flag, field in _FLAG_FIELDS.items():
        if params.get(flag) is not None:
            overrides[field] = params[flag]
    # a flagged multiplier beats an absolute h from the file
    if params.get("ell") is not None and params.get("h") is None:
        overrides["h"] = None
    if params.get("tau") is not None:
        overrides["taus"] = _parse_floats(params["tau"], "--tau")
    if params.get("no_rotation"):
        overrides["rotation_enabled"] = False
    if params.get("rotation_reset"):
        overrides["rotation_reset"] = True
    return load_config(overrides)


# ---- run bookkeeping ----


def _jsonable(value: Any) -> Any:
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, KernelKind):
        return value.value
    return value


class _Run:
    """Store, resolved config and manifest for one command invocation."""

    def __init__(self, ctx: click.Context, inputs: Sequence[str] = ()) -> None:
        self.params = dict(ctx.params)
        self.command = ctx.command.name or "unknown"
        self.cfg = _resolve(self.params)
        ctx.meta[_OUT_KEY] = self.cfg.out_dir
        self.store = ArtifactStore(self.cfg.out_dir)
        self.inputs = list(inputs)
        self.started_at = datetime.now(timezone.utc)
        self._t0 = time.monotonic()
        logger.info("cli.started", command=self.command, out=self.cfg.out_dir)

    def finish(self) -> None:
        outputs = list(self.store.written)
        manifest = RunManifest(
            command=self.command,
            options={k: _jsonable(v) for k, v in self.params.items()},
            config=self.cfg.model_dump(mode="json"),
            inputs=self.inputs,
            outputs=outputs,
            version=__version__,
            started_at=self.started_at,
            duration_seconds=time.monotonic() - self._t0,
        )
        self.store.write_json(MANIFEST_NAME, manifest.to_dict())
        metrics_out = self.params.get("metrics_out")
        if metrics_out:
            Path(metrics_out).write_bytes(generate_latest())
        logger.info("cli.finished", command=self.command, outputs=len(outputs))
        click.echo(f"{self.command}: {len(outputs)} file(s) written to {self.cfg.out_dir}")


def _dump_failed_solve(exc: SolverFailureError) -> None:
    out_dir = click.get_current_context().meta.get(_OUT_KEY)
    if not out_dir:
        return
    payload = {"code": exc.code, "message": exc.message, **exc.details}
    try:
        path = ArtifactStore(out_dir).write_json(FAILED_SOLVE_NAME, payload)
    except VQARError:
        logger.error("cli.dump_failed", out=out_dir)
        return
    click.echo(f"Failing instance written to: {path}", err=True)


def _handle_errors(fn: F) -> F:
    """Map the error hierarchy onto exit codes: 2 config, 3 data, 4 numerical."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        ctx = click.get_current_context()
        if kwargs.get("verbose"):
            configure_logging(level=logging.DEBUG)
        structlog.contextvars.bind_contextvars(command=ctx.command.name)
        try:
            return fn(*args, **kwargs)
        except SolverFailureError as exc:
            _dump_failed_solve(exc)
            click.echo(f"{exc.code}: {exc.message}", err=True)
            sys.exit(exc.exit_code)
        except VQARError as exc:
            click.echo(f"{exc.code}: {exc.message}", err=True)
            sys.exit(exc.exit_code)
        finally:
            structlog.contextvars.unbind_contextvars("command")

    return wrapper  # type: ignore[return-value]


# ---- shared options ----


def _common_options(fn: F) -> F:
    decorators = [
        click.option("--out", default=None, help="output directory"),
        click.option(
            "--config",
            "config_file",
            default=None,
            type=click.Path(exists=True),
            help="config override file (YAML or JSON)",
        ),
        click.option("--metrics-out", default=None, help="write prometheus metrics here"),
        click.option("--verbose", is_flag=True, help="debug logging"),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _sim_options(fn: F) -> F:
    decorators = [
        click.option("--case", type=click.IntRange(1, 3), default=None, help="DGP case"),
        click.option("--T", "T", type=int, default=None, help="series length"),
        click.option("--T0", "T0", type=int, default=None, help="warm-up length"),
        click.option("--seed", type=int, default=None, help="simulation seed"),
        click.option("--no-rotation", is_flag=True, help="case 3: disable the rotation"),
        click.option("--rotation-reset", is_flag=True, help="case 3: restart rotation after warm-up"),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _case_option(fn: F) -> F:
    """Case selector for commands that fit but do not simulate; picks the default ell."""
    return click.option(
        "--case", type=click.IntRange(1, 3), default=None, help="DGP case (default ell)"
    )(fn)


def _fit_options(fn: F) -> F:
    decorators = [
        click.option("--kR", "k_R", type=int, default=None, help="number of rings"),
        click.option("--kS", "k_S", type=int, default=None, help="directions per ring"),
        click.option(
            "--grid-schedule",
            type=click.Choice([s.value for s in GridSchedule]),
            default=None,
            help="fixed kR x kS, or grown with the series length",
        ),
        click.option(
            "--kernel",
            type=click.Choice([k.value for k in KernelKind]),
            default=None,
            help="kernel family",
        ),
        click.option("--ell", type=float, default=None, help="bandwidth multiplier"),
        click.option("--h", "h", type=float, default=None, help="absolute bandwidth"),
        click.option("--neighbors", type=int, default=None, help="kNN support size"),
        click.option("--tau", default=None, help="comma-separated orders; empty for median only"),
        click.option("--workers", type=int, default=None, help="worker pool size"),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _point_options(fn: F) -> F:
    decorators = [
        click.option("--times", default=None, help="comma-separated 1-based time indices"),
        click.option("--x", "x_points", multiple=True, help="conditioning point, comma-separated"),
        click.option("--random-times", type=int, default=None, help="number of random time indices"),
        click.option("--point-seed", type=int, default=0, help="seed for --random-times"),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


# ---- helpers ----

Estimator = Union[QuantileEstimator, PanelQuantileEstimator]


class _Point:
    def __init__(self, label: str, x: FloatArray, t: Optional[int] = None) -> None:
        self.label = label
        self.x = x
        self.t = t


def _points(
    series: FloatArray,
    times: Optional[str],
    x_points: Sequence[str],
    random_times: Optional[int],
    point_seed: int,
) -> list[_Point]:
    T = series.shape[0]
    chosen = _parse_ints(times, "--times") if times else []
    if random_times:
        if random_times > T:
            raise ConfigurationError(f"--random-times {random_times} exceeds T={T}")
        rng = np.random.default_rng(point_seed)
        chosen += sorted(int(t) + 1 for t in rng.choice(T, size=random_times, replace=False))
    points = []
    for t in chosen:
        if not 1 <= t <= T:
            raise ConfigurationError(f"time index {t} outside 1..{T}")
        points.append(_Point(f"t{t}", np.array(series[t - 1]), t))
    for n, text in enumerate(x_points):
        x = np.asarray(_parse_floats(text, "--x"), dtype=np.float64)
        if x.shape[0] != series.shape[1]:
            raise ConfigurationError(f"--x {text!r} has {x.shape[0]} coordinates, series has d={series.shape[1]}")
        points.append(_Point(f"x{n + 1}", x))
    if not points:
        raise click.UsageError("give conditioning points with --times, --random-times or --x")
    return points


def _case3_angle(cfg: VQARConfig, t: Optional[int]) -> float:
    """Rotation applied to the transition out of series index t."""
    if cfg.case != 3 or not cfg.rotation_enabled or t is None:
        return 0.0
    return rotation_angle(t if cfg.rotation_reset else cfg.T0 + t)


def _oracle_map(cfg: VQARConfig, point: _Point, estimator: Estimator) -> QuantileMap:
    if cfg.case == 1:
        return case1_oracle_map(point.x, estimator.grid)
    return sim_oracle_map(
        cfg.case,
        point.x,
        cfg.oracle_samples,
        estimator.grid,
        seed=cfg.seed,
        angle=_case3_angle(cfg, point.t),
    )


def _point_summary(result: PointResult) -> dict[str, Any]:
    entry: dict[str, Any] = {"label": result.label, "x": result.x, "ok": result.ok}
    if result.ok and result.contour_set is not None:
        cs = result.contour_set
        entry["monotone_max_violation"] = cs.monotone_max_violation
        if cs.contours and cs.contours[0].shape[1] == 2:
            entry["nesting"] = nesting_report(cs)
    else:
        entry["error_code"] = result.error_code
        entry["error_message"] = result.error_message
    return entry


def _write_results(run: _Run, stem: str, results: Sequence[PointResult]) -> None:
    for result in results:
        if result.contour_set is not None:
            run.store.write_contours(f"{stem}_{result.label}", result.contour_set)
    run.store.write_json(f"{stem}_points.json", [_point_summary(r) for r in results])
    failed = [r for r in results if not r.ok]
    for r in failed:
        click.echo(f"{r.label}: {r.error_code}: {r.error_message}", err=True)


def _load_estimator(paths: Sequence[str], cfg: VQARConfig) -> tuple[FloatArray, Estimator]:
    if len(paths) == 1:
        series = read_series_csv(paths[0])
        return series, QuantileEstimator(series, cfg.fit_config(series.shape[1], series.shape[0]))
    panel = read_panel(paths)
    fit_cfg = cfg.fit_config(panel[0].shape[1], sum(len(s) for s in panel))
    return panel[0], PanelQuantileEstimator(panel, fit_cfg)


# ---- commands ----


@click.group()
@click.version_option(__version__, prog_name="vqar")
def cli() -> None:
    """vqar -- nonparametric vector quantile autoregression"""


@cli.command()
@_sim_options
@click.option("--name", default="series", help="output file stem")
@_common_options
@click.pass_context
@_handle_errors
def simulate(ctx: click.Context, name: str, **_: Any) -> None:
    """Simulate one of the three DGP cases to CSV."""
    run = _Run(ctx)
    sim_cfg = run.cfg.sim_config()
    series = simulate_series(sim_cfg)
    run.store.write_series(f"{name}.csv", series)
    run.store.write_json(f"{name}.sim.json", sim_cfg.model_dump(mode="json"))
    run.finish()


@cli.command()
@click.argument("series_paths", nargs=-1, required=True, type=click.Path(exists=True))
@_point_options
@_case_option
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def fit(
    ctx: click.Context,
    series_paths: tuple[str, ...],
    times: Optional[str],
    x_points: tuple[str, ...],
    random_times: Optional[int],
    point_seed: int,
    **_: Any,
) -> None:
    """Conditional contours at chosen points (several files fit a panel)."""
    run = _Run(ctx, series_paths)
    series, estimator = _load_estimator(series_paths, run.cfg)
    points = _points(series, times, x_points, random_times, point_seed)
    runner = FitRunner(estimator, run.cfg.taus, max_workers=run.cfg.workers)
    results = runner.run([PointTask(x=p.x, label=p.label) for p in points])
    _write_results(run, "fit", results)
    run.finish()


@cli.command()
@click.argument("series_path", type=click.Path(exists=True))
@_case_option
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def predict(ctx: click.Context, series_path: str, **_: Any) -> None:
    """One-step-ahead contours at the last observation, labelled T+1."""
    run = _Run(ctx, [series_path])
    series = read_series_csv(series_path)
    estimator = QuantileEstimator(series, run.cfg.fit_config(series.shape[1], series.shape[0]))
    qmap = estimator.predict()
    report = check_monotone(qmap)
    cs = contours(qmap, run.cfg.taus, report.max_violation)
    T = series.shape[0]
    extra: dict[str, Any] = {"label": "T+1", "T": T}
    if T >= 3:
        extra["var1_mean"] = var1_mean_forecast(series, series[-1]).tolist()
    run.store.write_contours("predict", replace(cs, extra=extra))
    run.finish()


@cli.command()
@click.argument("series_path", type=click.Path(exists=True))
@click.option("--eval-fraction", type=float, default=None, help="share of times evaluated")
@_case_option
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def coverage(ctx: click.Context, series_path: str, **_: Any) -> None:
    """Leave-one-out coverage table of the prediction regions."""
    run = _Run(ctx, [series_path])
    cfg = run.cfg
    series = read_series_csv(series_path)
    T = series.shape[0]
    if T < cfg.coverage_min_T:
        raise InsufficientDataError(cfg.coverage_min_T, T)
    estimator = QuantileEstimator(series, cfg.fit_config(series.shape[1], series.shape[0]))
    idx = evaluation_indices(T, cfg.eval_fraction, cfg.eval_seed)
    rates = coverage_table(estimator, cfg.taus, idx)
    frame = pd.DataFrame(
        {"tau": list(rates), "coverage": list(rates.values()), "n_eval": len(idx)}
    )
    run.store.write_frame("coverage.csv", frame)
    run.finish()


@cli.command()
@click.argument("series_path", type=click.Path(exists=True))
@_point_options
@click.option("--oracle-samples", type=int, default=None, help="transitions per simulated oracle")
@_sim_options
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def oracle(
    ctx: click.Context,
    series_path: str,
    times: Optional[str],
    x_points: tuple[str, ...],
    random_times: Optional[int],
    point_seed: int,
    **_: Any,
) -> None:
    """Oracle contours and fitted-vs-oracle errors at chosen points."""
    run = _Run(ctx, [series_path])
    cfg = run.cfg
    series = read_series_csv(series_path)
    estimator = QuantileEstimator(series, cfg.fit_config(series.shape[1], series.shape[0]))
    points = _points(series, times, x_points, random_times, point_seed)
    runner = FitRunner(estimator, cfg.taus, max_workers=cfg.workers)
    results = runner.run([PointTask(x=p.x, label=p.label) for p in points])

    rows = []
    for point, result in zip(points, results):
        reference = _oracle_map(cfg, point, estimator)
        run.store.write_contours(f"oracle_{point.label}", contours(reference, cfg.taus))
        row: dict[str, Any] = {"label": point.label}
        if result.qmap is None:
            row["quantile_mse"] = float("nan")
        else:
            row["quantile_mse"] = quantile_mse(result.qmap, reference)
            if cfg.case == 1:
                for tau in cfg.taus:
                    region = case1_region(point.x, tau)
                    row[f"radial_dev_{tau:g}"] = radial_deviation(contour(result.qmap, tau), region)
        rows.append(row)
    _write_results(run, "fit", results)
    run.store.write_frame("oracle_mse.csv", pd.DataFrame(rows))
    run.finish()


@cli.command()
@click.argument("series_path", type=click.Path(exists=True))
@click.option("--at-tau", type=float, default=0.4, help="order of the contour holding the start points")
@click.option("--count", type=int, default=8, help="number of start points on that contour")
@_case_option
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def stationary(ctx: click.Context, series_path: str, at_tau: float, count: int, **_: Any) -> None:
    """Unconditional contours plus one-step predictions from points on one of them."""
    run = _Run(ctx, [series_path])
    cfg = run.cfg
    series = read_series_csv(series_path)
    estimator = QuantileEstimator(series, cfg.fit_config(series.shape[1], series.shape[0]))
    uncond = estimator.fit_stationary()
    run.store.write_contours("stationary", contours(uncond, cfg.taus, check_monotone(uncond).max_violation))

    starts = points_on_contour(uncond, at_tau, count)
    runner = FitRunner(estimator, cfg.taus, max_workers=cfg.workers)
    results = runner.run([PointTask(x=x, label=f"p{n + 1}") for n, x in enumerate(starts)])
    _write_results(run, "stationary_pred", results)

    rows = []
    for result in results:
        var1 = var1_mean_forecast(series, result.x)
        row: dict[str, Any] = {"label": result.label}
        for i, v in enumerate(result.x):
            row[f"x{i + 1}"] = v
        for i in range(series.shape[1]):
            row[f"median{i + 1}"] = float(result.contour_set.median[i]) if result.contour_set else float("nan")
            row[f"var1_{i + 1}"] = float(var1[i])
        rows.append(row)
    run.store.write_frame("stationary_predictions.csv", pd.DataFrame(rows))
    run.finish()


@cli.command()
@click.argument("series_path", type=click.Path(exists=True))
@click.option("--ells", default="0.1,0.2,0.3,0.4,0.5,0.8", help="comma-separated multipliers")
@_point_options
@click.option("--oracle-samples", type=int, default=None, help="transitions per simulated oracle")
@_sim_options
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def sweep(
    ctx: click.Context,
    series_path: str,
    ells: str,
    times: Optional[str],
    x_points: tuple[str, ...],
    random_times: Optional[int],
    point_seed: int,
    **_: Any,
) -> None:
    """Oracle error of the fit across bandwidth multipliers."""
    run = _Run(ctx, [series_path])
    cfg = run.cfg
    series = read_series_csv(series_path)
    points = _points(series, times, x_points, random_times, point_seed)
    multipliers = _parse_floats(ells, "--ells")
    if not multipliers:
        raise click.UsageError("--ells is empty")

    references: list[QuantileMap] = []
    rows = []
    for ell in multipliers:
        fit_cfg = cfg.model_copy(update={"ell": ell, "h": None}).fit_config(
            series.shape[1], series.shape[0]
        )
        estimator = QuantileEstimator(series, fit_cfg)
        if not references:
            references = [_oracle_map(cfg, p, estimator) for p in points]
        results = FitRunner(estimator, [], max_workers=cfg.workers).run(
            [PointTask(x=p.x, label=p.label) for p in points]
        )
        errors = [quantile_mse(r.qmap, ref) for r, ref in zip(results, references) if r.qmap is not None]
        rows.append(
            {
                "ell": ell,
                "h": estimator.bandwidth,
                "mean_mse": float(np.mean(errors)) if errors else float("nan"),
                "n_points": len(errors),
            }
        )
        logger.info("cli.sweep_step", ell=ell, n_points=len(errors))
    run.store.write_frame("sweep.csv", pd.DataFrame(rows))
    run.finish()


@cli.command()
@click.option("--cases", default="1,2,3", help="comma-separated cases")
@click.option("--n-pairs", type=int, default=500, help="random point pairs")
@click.option("--n-eps", type=int, default=2000, help="innovations per pair")
@click.option("--radius", type=float, default=10.0, help="sampling disc radius")
@click.option("--n-mc", type=int, default=1_000_000, help="draws for the case-3 second moment")
@click.option("--seed", type=int, default=None, help="random seed")
@_common_options
@click.pass_context
@_handle_errors
def contraction(
    ctx: click.Context,
    cases: str,
    n_pairs: int,
    n_eps: int,
    radius: float,
    n_mc: int,
    **_: Any,
) -> None:
    """Contraction witnesses for the DGP cases."""
    run = _Run(ctx)
    seed = run.cfg.seed
    bounds = {1: float(CASE1_BOUND), 2: float(CASE2_BOUND)}
    rows = []
    for case in _parse_ints(cases, "--cases"):
        if case not in (1, 2, 3):
            raise ConfigurationError(f"unknown case {case}")
        rows.append(
            {
                "case": case,
                "process": SimCase(case).name.lower(),
                "contraction": contraction_estimate(case, n_pairs, n_eps, radius=radius, seed=seed),
                "analytic_bound": bounds.get(case, float("nan")),
                "second_moment": mixture_second_moment(n_mc, seed) if case == 3 else float("nan"),
            }
        )
    run.store.write_frame("contraction.csv", pd.DataFrame(rows))
    run.finish()


@cli.command()
@click.argument("contour_files", nargs=-1, type=click.Path(exists=True))
@click.option("--label", "labels", multiple=True, help="legend label per file")
@click.option("--name", default="figure", help="output file stem")
@click.option("--smooth", is_flag=True, help="cosmetic spline smoothing")
@_common_options
@click.pass_context
@_handle_errors
def render(
    ctx: click.Context,
    contour_files: tuple[str, ...],
    labels: tuple[str, ...],
    name: str,
    smooth: bool,
    **_: Any,
) -> None:
    """Overlay contour files in one SVG figure."""
    if not contour_files:
        raise click.UsageError("no contour files given")
    if labels and len(labels) != len(contour_files):
        raise click.UsageError("--label must be given once per contour file")
    run = _Run(ctx, contour_files)
    groups = []
    for n, path in enumerate(contour_files):
        cs = read_contours(path)
        if cs.median.shape[0] != 2:
            raise ConfigurationError(f"{path}: only 2-D contours can be rendered")
        groups.append(ContourGroup(label=labels[n] if labels else Path(path).stem, contours=cs))
    run.store.write_text(f"{name}.svg", render_contours(groups, smooth=smooth))
    run.finish()


@cli.command()
@click.argument("manifest_path", type=click.Path(exists=True))
@click.pass_context
@_handle_errors
def rerun(ctx: click.Context, manifest_path: str) -> None:
    """Re-execute the command recorded in a manifest."""
    manifest = RunManifest.from_dict(read_json(manifest_path))
    command = cli.commands.get(manifest.command)
    if command is None or manifest.command == "rerun":
        raise ConfigurationError(f"manifest names no replayable command: {manifest.command!r}")
    if manifest.version != __version__:
        logger.warning("cli.version_mismatch", recorded=manifest.version, running=__version__)
    options = {k: tuple(v) if isinstance(v, list) else v for k, v in manifest.options.items()}
    ctx.invoke(command, **options)


@cli.command("grid")
@click.option("--d", "d", type=int, default=2, help="dimension")
@_fit_options
@_common_options
@click.pass_context
@_handle_errors
def grid_cmd(ctx: click.Context, d: int, **_: Any) -> None:
    """Write the reference grid as JSON."""
    run = _Run(ctx)
    run.store.write_json("grid.json", grid_from_config(run.cfg.grid_config(d)).to_dict())
    run.finish()
