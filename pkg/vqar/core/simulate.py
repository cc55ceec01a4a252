"""
Seeded generators for the three simulated processes and Monte-Carlo contraction
witnesses for their asymptotic stationarity.

All processes are X_{t+1} = g(X_t) + s(X_t) R(t) eps_{t+1} in R^2:

  case 1: g = ((x1+x2)/3, sqrt(|x|^2+5)/2),  s = sin(pi|x|/10),  eps ~ N(0, I)
  case 2: g = (tanh((x1+x2)/2) - 1/2, cos(pi/10 f(x1+x2))),  s = |x|/2,
          f(z) = z/(1+|z|),  eps ~ Unif[-1,1]^2
  case 3: g = (log(|x|+2)/(|x|+2), |x|/(|x|+sqrt 2)),  s = sqrt(|x|+1),
          R(t) rotation by pi t/5000,  eps ~ clover mixture of four N(m_i, I/25)

Random streams come from numpy's PCG64 `default_rng`; normals use its ziggurat
sampler. Draw order per series: X_0, then all T0+T innovations (case 3 draws
its T0+T component indices before the Gaussian parts).
"""

from typing import Callable

import numpy as np
import numpy.typing as npt
import structlog

from vqar.errors import ConfigurationError
from vqar.errors import InvalidCountError
from vqar.models.config import SimConfig

logger = structlog.get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

ROTATION_PERIOD = 5000.0
CLOVER_MEANS = np.array([[0.0, 0.0], [0.866, -0.5], [-0.866, -0.5], [0.0, 1.0]])
CLOVER_SD = 0.2
# pairs closer than this are redrawn in contraction_estimate
MIN_PAIR_DISTANCE = 1e-8


# ---- deterministic parts ----


def _norm(x: FloatArray) -> FloatArray:
    return np.asarray(np.linalg.norm(x, axis=-1))


def drift(case: int, x: FloatArray) -> FloatArray:
    """g(x) for a single point (2,) or a batch (n, 2)."""
    x = np.asarray(x, dtype=np.float64)
    r = _norm(x)
    x1, x2 = x[..., 0], x[..., 1]
    if case == 1:
        out = ((x1 + x2) / 3.0, 0.5 * np.sqrt(r**2 + 5.0))
    elif case == 2:
        z = x1 + x2
        out = (np.tanh(0.5 * z) - 0.5, np.cos(np.pi / 10.0 * (z / (1.0 + np.abs(z)))))
    elif case == 3:
        out = (np.log(r + 2.0) / (r + 2.0), r / (r + np.sqrt(2.0)))
    else:
        raise ConfigurationError(f"unknown case {case}")
    return np.stack(out, axis=-1)


def noise_scale(case: int, x: FloatArray) -> FloatArray:
    """s(x); may be negative in case 1."""
    r = _norm(np.asarray(x, dtype=np.float64))
    if case == 1:
        return np.asarray(np.sin(np.pi * r / 10.0))
    if case == 2:
        return np.asarray(0.5 * r)
    if case == 3:
        return np.asarray(np.sqrt(r + 1.0))
    raise ConfigurationError(f"unknown case {case}")


def rotation(angle: float) -> FloatArray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def rotation_angle(t: int) -> float:
    return float(np.pi * t / ROTATION_PERIOD)


def step(case: int, x: FloatArray, eps: FloatArray, angle: float = 0.0) -> FloatArray:
    """One transition with a given innovation; angle only matters in case 3."""
    shock = np.asarray(eps, dtype=np.float64)
    if case == 3 and angle:
        shock = shock @ rotation(angle).T
    return drift(case, x) + noise_scale(case, x)[..., None] * shock


# ---- innovations ----


def draw_noise(case: int, n: int, rng: np.random.Generator) -> FloatArray:
    if case == 1:
        return rng.standard_normal((n, 2))
    if case == 2:
        return rng.uniform(-1.0, 1.0, size=(n, 2))
    if case == 3:
        # one uniform draw picks the component
        comp = np.floor(4.0 * rng.random(n)).astype(np.intp)
        return CLOVER_MEANS[comp] + CLOVER_SD * rng.standard_normal((n, 2))
    raise ConfigurationError(f"unknown case {case}")


def _initial_state(case: int, rng: np.random.Generator) -> FloatArray:
    if case == 2:
        return rng.uniform(-1.0, 1.0, size=2)
    return rng.standard_normal(2)


# ---- generators ----


def _generate(cfg: SimConfig, case: int) -> FloatArray:
    if cfg.case != case:
        raise ConfigurationError(f"config is for case {cfg.case}, not case {case}")
    rng = np.random.default_rng(cfg.seed)
    total = cfg.T0 + cfg.T
    x = _initial_state(case, rng)
    eps = draw_noise(case, total, rng)
    raw = np.empty((total + 1, 2))
    raw[0] = x

    rotate = case == 3 and cfg.rotation_enabled
    for t in range(total):
        angle = 0.0
        if rotate:
            clock = t - cfg.T0 if (cfg.rotation_reset and t >= cfg.T0) else t
            angle = rotation_angle(clock)
        raw[t + 1] = step(case, raw[t], eps[t], angle)

    if not np.all(np.isfinite(raw)):
        raise ConfigurationError(f"case {case} diverged for seed {cfg.seed}")
    logger.debug("simulate.generated", case=case, T=cfg.T, T0=cfg.T0, seed=cfg.seed)
    # series index 1 is raw index T0+1
    return raw[cfg.T0 + 1 :]


def gen_case1(cfg: SimConfig) -> FloatArray:
    return _generate(cfg, 1)


def gen_case2(cfg: SimConfig) -> FloatArray:
    return _generate(cfg, 2)


def gen_case3(cfg: SimConfig) -> FloatArray:
    return _generate(cfg, 3)


_GENERATORS: dict[int, Callable[[SimConfig], FloatArray]] = {
    1: gen_case1,
    2: gen_case2,
    3: gen_case3,
}


def simulate(cfg: SimConfig) -> FloatArray:
    """Dispatch on cfg.case."""
    return _GENERATORS[cfg.case](cfg)


def transition(
    case: int,
    x: FloatArray,
    n: int,
    rng: np.random.Generator,
    angle: float = 0.0,
) -> FloatArray:
    """n independent draws of X_{t+1} given X_t = x."""
    if n < 1:
        raise InvalidCountError("n", n)
    x = np.asarray(x, dtype=np.float64).reshape(2)
    eps = draw_noise(case, n, rng)
    return step(case, x, eps, angle)


# ---- stationarity witnesses ----


def _uniform_disc(rng: np.random.Generator, n: int, radius: float) -> FloatArray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def contraction_estimate(
    case: int,
    n_pairs: int,
    n_eps: int,
    radius: float = 10.0,
    seed: int = 0,
    chunk: int = 100,
) -> float:
    """max over random pairs in radius*B^2 of E|G(x,e) - G(y,e)|^2 / |x - y|^2.

    Both points share the same innovations; case 3 uses the identity rotation.
    """
    if n_pairs < 1:
        raise InvalidCountError("n_pairs", n_pairs)
    if n_eps < 1:
        raise InvalidCountError("n_eps", n_eps)
    if radius <= 0:
        raise ConfigurationError(f"radius must be positive, got {radius}")

    rng = np.random.default_rng(seed)
    xs = _uniform_disc(rng, n_pairs, radius)
    ys = _uniform_disc(rng, n_pairs, radius)
    close = _norm(xs - ys) < MIN_PAIR_DISTANCE
    while np.any(close):
        ys[close] = _uniform_disc(rng, int(close.sum()), radius)
        close = _norm(xs - ys) < MIN_PAIR_DISTANCE
    eps = draw_noise(case, n_eps, rng)

    best = 0.0
    for start in range(0, n_pairs, chunk):
        x, y = xs[start : start + chunk], ys[start : start + chunk]
        d_drift = drift(case, x) - drift(case, y)
        d_scale = noise_scale(case, x) - noise_scale(case, y)
        diff = d_drift[:, None, :] + d_scale[:, None, None] * eps[None, :, :]
        ratio = np.mean(np.sum(diff**2, axis=2), axis=1) / np.sum((x - y) ** 2, axis=1)
        best = max(best, float(ratio.max()))
    logger.debug("simulate.contraction", case=case, estimate=best, seed=seed)
    return best


def mixture_second_moment(n: int = 1_000_000, seed: int = 0) -> float:
    """Monte-Carlo E|eps|^2 for the clover mixture (about 0.83)."""
    rng = np.random.default_rng(seed)
    eps = draw_noise(3, n, rng)
    return float(np.mean(np.sum(eps**2, axis=1)))


# analytic bounds from the contraction arguments
CASE1_BOUND = 17.0 / 36.0 + np.pi**2 / 50.0
CASE2_BOUND = (25.0 + np.pi**2) / 50.0 + 1.0 / 6.0
