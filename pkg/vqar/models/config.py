"""
VQARConfig -- validated configuration via pydantic-settings.
Supports env overrides (VQAR_ prefix), YAML file loading, and .env files.

The small BaseModels (GridConfig, KernelSpec, SimConfig, FitConfig) are what
the numerical code consumes; VQARConfig holds the defaults they are built from.
"""

import math
from pathlib import Path
from typing import Any
from typing import Optional

import yaml
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import ValidationError
from pydantic import model_validator
from pydantic_settings import BaseSettings
from pydantic_settings import PydanticBaseSettingsSource
from pydantic_settings import SettingsConfigDict

from vqar.errors import ConfigurationError
from vqar.models.enums import GridSchedule
from vqar.models.enums import KernelKind

SETTINGS_PATH = Path("config/settings.yaml")

# default grid: k_R = k_S = ceil(sqrt(225))
DEFAULT_K_TARGET = 225

# per-case bandwidth multipliers from the simulation study
CASE_ELL = {1: 0.5, 2: 0.4, 3: 0.1}


def scheduled_ring_count(T: int) -> int:
    """k_R = k_S = ceil(sqrt(2 sqrt(T))) under the growing schedule, so k grows like 2 sqrt(T)."""
    if T < 1:
        raise ConfigurationError(f"series length must be positive, got {T}")
    return math.ceil(math.sqrt(2.0 * math.sqrt(T)))


class GridConfig(BaseModel):
    """Shape of the reference grid on the unit ball."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    d: int = Field(default=2, ge=1)
    k_R: int = Field(default=15, ge=1)
    k_S: int = Field(default=15, ge=1)
    seed: int = 0

    @property
    def size(self) -> int:
        return self.k_R * self.k_S + 1


class KernelSpec(BaseModel):
    """Kernel family plus bandwidth rule: absolute h or multiplier ell."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: KernelKind = KernelKind.GAUSSIAN_TRUNCATED_KNN
    neighbor_count: Optional[int] = Field(default=None, ge=1)
    h: Optional[float] = Field(default=None, gt=0.0)
    ell: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="before")
    @classmethod
    def _one_bandwidth_rule(cls, data: Any) -> Any:
        # an explicit h wins; otherwise ell defaults to 0.5
        if isinstance(data, dict):
            if data.get("h") is not None:
                return {**data, "ell": None}
            if data.get("ell") is None:
                return {**data, "ell": 0.5}
        return data

    def with_neighbors(self, grid: GridConfig) -> "KernelSpec":
        """Fill neighbor_count with k_R*k_S when the kNN kernel leaves it open."""
        if self.kind is KernelKind.GAUSSIAN_TRUNCATED_KNN and self.neighbor_count is None:
            return self.model_copy(update={"neighbor_count": grid.k_R * grid.k_S})
        return self


class SimConfig(BaseModel):
    """One simulated series."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    case: int = Field(default=1, ge=1, le=3)
    T: int = Field(default=10_000, ge=1)
    T0: int = Field(default=10_000, ge=0)
    seed: int = 0
    rotation_enabled: bool = True
    # restart the rotation clock after warm-up (case 3)
    rotation_reset: bool = False


class FitConfig(BaseModel):
    """Everything a conditional fit needs beyond the data."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    grid: GridConfig = Field(default_factory=GridConfig)
    kernel: KernelSpec = Field(default_factory=KernelSpec)


class _YamlSettingsSource(PydanticBaseSettingsSource):
    """Load config from a YAML file if it exists."""

    def __init__(self, settings_cls: type[BaseSettings], path: Path = SETTINGS_PATH) -> None:
        super().__init__(settings_cls)
        self._yaml_data: dict[str, Any] = {}
        if path.exists():
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
            # flatten nested YAML sections into top-level keys
            for section_val in raw.values():
                if isinstance(section_val, dict):
                    self._yaml_data.update(section_val)

    def get_field_value(self, field: Any, field_name: str) -> tuple[Any, str, bool]:
        val = self._yaml_data.get(field_name)
        return val, field_name, val is not None

    def __call__(self) -> dict[str, Any]:
        result: dict[str, Any] = {}
        for field_name in self.settings_cls.model_fields:
            val, _, found = self.get_field_value(None, field_name)
            if found:
                result[field_name] = val
        return result


class VQARConfig(BaseSettings):
    """Run defaults with env overrides, YAML loading, and .env support."""

    model_config = SettingsConfigDict(
        env_prefix="VQAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="forbid",
    )

    # grid
    k_R: int = Field(default=math.ceil(math.sqrt(DEFAULT_K_TARGET)), ge=1)
    k_S: int = Field(default=math.ceil(math.sqrt(DEFAULT_K_TARGET)), ge=1)
    grid_seed: int = 0
    grid_schedule: GridSchedule = GridSchedule.FIXED

    # kernel
    kernel: KernelKind = KernelKind.GAUSSIAN_TRUNCATED_KNN
    ell: Optional[float] = Field(default=None, gt=0.0)
    h: Optional[float] = Field(default=None, gt=0.0)
    neighbors: Optional[int] = Field(default=None, ge=1)

    # simulation
    case: int = Field(default=1, ge=1, le=3)
    T: int = Field(default=10_000, ge=1)
    T0: int = Field(default=10_000, ge=0)
    seed: int = 0
    rotation_enabled: bool = True
    rotation_reset: bool = False

    # prediction and evaluation
    taus: list[float] = Field(default_factory=lambda: [0.2, 0.4, 0.8])
    coverage_min_T: int = Field(default=500, ge=2)
    eval_fraction: float = Field(default=0.05, gt=0.0, le=1.0)
    eval_seed: int = 0
    oracle_samples: int = Field(default=100_000, ge=1)

    # execution
    workers: int = Field(default=4, ge=1, le=64)
    out_dir: str = "out"

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Priority: init kwargs > env vars > .env file > YAML > defaults."""
        return (
            init_settings,
            env_settings,
            dotenv_settings,
            _YamlSettingsSource(settings_cls),
            file_secret_settings,
        )

    # ---- builders ----

    def grid_config(self, d: int = 2, T: Optional[int] = None) -> GridConfig:
        """Fixed k_R x k_S, or sized from the series length T under the growing schedule."""
        if self.grid_schedule is GridSchedule.GROWING and T is not None:
            n = scheduled_ring_count(T)
            return GridConfig(d=d, k_R=n, k_S=n, seed=self.grid_seed)
        return GridConfig(d=d, k_R=self.k_R, k_S=self.k_S, seed=self.grid_seed)

    def kernel_spec(self) -> KernelSpec:
        """Resolve the bandwidth rule; ell falls back to the per-case default."""
        if self.h is not None:
            return KernelSpec(kind=self.kernel, neighbor_count=self.neighbors, h=self.h, ell=None)
        ell = self.ell if self.ell is not None else CASE_ELL[self.case]
        return KernelSpec(kind=self.kernel, neighbor_count=self.neighbors, ell=ell)

    def fit_config(self, d: int = 2, T: Optional[int] = None) -> FitConfig:
        grid = self.grid_config(d, T)
        return FitConfig(grid=grid, kernel=self.kernel_spec().with_neighbors(grid))

    def sim_config(self) -> SimConfig:
        return SimConfig(
            case=self.case,
            T=self.T,
            T0=self.T0,
            seed=self.seed,
            rotation_enabled=self.rotation_enabled,
            rotation_reset=self.rotation_reset,
        )


def load_config(overrides: Optional[dict[str, Any]] = None) -> VQARConfig:
    """Build VQARConfig, translating pydantic failures into ConfigurationError."""
    try:
        return VQARConfig(**(overrides or {}))
    except ValidationError as exc:
        fields = [".".join(str(p) for p in err["loc"]) for err in exc.errors()]
        raise ConfigurationError(
            f"invalid configuration: {', '.join(fields)}", {"errors": str(exc)}
        ) from None
