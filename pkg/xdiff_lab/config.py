# xdiff_lab/config.py
import hashlib
import json
import math
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from xdiff_lab.exceptions import ConfigError
from xdiff_lab.params.models import ModelParams, ScalingParams


class LogHandlerConfig(BaseModel):
    """Configuration for a single log handler"""

    level: str = Field(default="INFO", description="Logging level for this handler")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log message format",
    )
    class_name: str = Field(
        description="Handler class name (FileHandler, StreamHandler, etc.)"
    )
    handler_kwargs: dict[str, Any] = Field(
        default_factory=dict,
        description="Additional arguments for handler initialization",
    )

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        """Validate logging level"""
        valid_levels = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level. Must be one of: {valid_levels}")
        return v.upper()


class LoggingConfig(BaseModel):
    """Logging configuration"""

    level: str = Field(default="INFO", description="Root logger level")
    handlers: dict[str, LogHandlerConfig] = Field(
        default_factory=lambda: {
            "console": LogHandlerConfig(
                class_name="StreamHandler",
                level="INFO",
                format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            )
        },
        description="Log handlers configuration",
    )
    log_path: Path | None = Field(default=None, description="Base path for log files")

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        return LogHandlerConfig.validate_level(v)

    @classmethod
    def from_env(cls) -> "LoggingConfig":
        """Create logging config from XDIFF_LOG_* environment variables"""
        load_dotenv()
        handlers = {}

        if os.getenv("XDIFF_LOG_CONSOLE", "true").lower() == "true":
            handlers["console"] = LogHandlerConfig(
                class_name="StreamHandler",
                level=os.getenv("XDIFF_LOG_CONSOLE_LEVEL", "INFO"),
            )

        log_path_str = os.getenv("XDIFF_LOG_PATH")
        log_path = Path(log_path_str) if log_path_str else None

        if log_path:
            max_bytes = int(os.getenv("XDIFF_LOG_MAX_BYTES", str(10 * 1024 * 1024)))
            backup_count = int(os.getenv("XDIFF_LOG_BACKUP_COUNT", "5"))
            handlers["file"] = LogHandlerConfig(
                class_name="RotatingFileHandler",
                level=os.getenv("XDIFF_LOG_FILE_LEVEL", "INFO"),
                handler_kwargs={
                    "filename": str(log_path / "xdiff.log"),
                    "maxBytes": max_bytes,
                    "backupCount": backup_count,
                },
            )

            if os.getenv("XDIFF_LOG_JSON", "false").lower() == "true":
                handlers["json"] = LogHandlerConfig(
                    class_name="JsonRotatingFileHandler",
                    level=os.getenv("XDIFF_LOG_JSON_LEVEL", "INFO"),
                    handler_kwargs={
                        "filename": str(log_path / "xdiff.json"),
                        "maxBytes": max_bytes,
                        "backupCount": backup_count,
                    },
                )

        return cls(
            level=os.getenv("XDIFF_LOG_LEVEL", "INFO"),
            handlers=handlers,
            log_path=log_path,
        )

    def model_post_init(self, __context: Any) -> None:
        if self.log_path:
            try:
                self.log_path.mkdir(parents=True, exist_ok=True)
            except (OSError, PermissionError) as e:
                raise ValueError(f"Could not create log directory: {e}") from e


class GridSettings(BaseModel):
    """Periodic grid: dimension, torus side and points per axis"""

    model_config = ConfigDict(frozen=True)

    d: int = Field(default=1, ge=1, le=3, description="Spatial dimension")
    L: float = Field(default=16.0 * math.pi, gt=0, description="Torus side length")
    M: int = Field(default=2048, description="Points per axis (power of two)")

    @field_validator("M")
    @classmethod
    def validate_m(cls, v: int) -> int:
        if v < 4 or v & (v - 1):
            raise ValueError(f"M must be a power of two >= 4, got {v}")
        return v


class SolverSettings(BaseModel):
    """Pseudo-spectral solver settings shared by the regularized and limit runs"""

    model_config = ConfigDict(frozen=True)

    dt: float = Field(default=1e-3, gt=0, description="Time step")
    T: float = Field(default=1.0, gt=0, description="Horizon")
    dealias: bool = Field(default=True, description="2/3-rule dealiasing of products")
    n_snapshots: int = Field(
        default=21, ge=2, description="Equispaced snapshot times in [0, T]"
    )
    hs_order: float | None = Field(
        default=None, description="Order of the H^s monitor, d/2 + 2.5 when unset"
    )
    growth_limit: float = Field(
        default=10.0, gt=1, description="Per-step norm growth treated as blowup"
    )
    blowup_retries: int = Field(
        default=2, ge=0, description="Retries with halved dt after a blowup"
    )

    def snapshot_times(self) -> list[float]:
        return [self.T * k / (self.n_snapshots - 1) for k in range(self.n_snapshots)]


class ParticleSettings(BaseModel):
    """Particle-system stepping settings"""

    model_config = ConfigDict(frozen=True)

    dt: float = Field(default=1e-2, gt=0, description="Euler-Maruyama time step")
    drift: Literal["grid", "direct"] = Field(
        default="grid", description="Force evaluation path"
    )
    jump_cap: float | None = Field(
        default=None, gt=0, description="Optional cap on increment length (off)"
    )
    write_positions: bool = Field(
        default=False, description="Dump positions CSV at snapshot times"
    )


class ScalingSettings(BaseModel):
    """Scaling exponents plus the N-lists each experiment sweeps"""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=0.2, description="delta_N = N^-delta")
    rho: float = Field(default=0.05, description="Small positive margin")
    kappa: float = Field(default=0.23, description="kappa_N = N^(kappa/d)")
    kappa_hat: float = Field(default=0.03, description="kappa_hat_N = N^(kappa_hat/d)")
    N_list: list[int] = Field(
        default_factory=lambda: [500, 2000, 8000],
        description="N values for the particle experiments",
    )
    reg_N_list: list[int] = Field(
        default_factory=lambda: [2**6, 2**8, 2**10, 2**12],
        description="N values for the regularization study",
    )
    variance_N_list: list[int] = Field(
        default_factory=lambda: [2**k for k in range(8, 15)],
        description="N values for the force-variance study",
    )

    @field_validator("N_list", "reg_N_list", "variance_N_list")
    @classmethod
    def validate_n_list(cls, v: list[int]) -> list[int]:
        if not v or any(N < 1 for N in v):
            raise ValueError("N-lists must be non-empty lists of positive integers")
        return sorted(set(v))

    def params_for(self, N: int, d: int) -> ScalingParams:
        return ScalingParams(
            N=N,
            d=d,
            delta=self.delta,
            rho=self.rho,
            kappa=self.kappa,
            kappa_hat=self.kappa_hat,
        )


class SeedSettings(BaseModel):
    """Master seed and seed-ensemble size"""

    model_config = ConfigDict(frozen=True)

    master_seed: int = Field(
        default=20240601, ge=0, lt=2**64, description="Unsigned 64-bit master seed"
    )
    count: int = Field(default=8, ge=1, description="Seeds per N")

    def seeds(self) -> list[int]:
        """Per-run seeds derived from the master seed"""
        return [self.master_seed + k for k in range(self.count)]


class BumpSpec(BaseModel):
    """A periodic Gaussian bump carrying ``amplitude`` units of mass"""

    model_config = ConfigDict(frozen=True)

    center: list[float] = Field(description="Bump centre, one entry per axis")
    width: float = Field(gt=0, description="Standard deviation")
    amplitude: float = Field(ge=0, description="Mass carried by the bump")


class SpeciesInitial(BaseModel):
    model_config = ConfigDict(frozen=True)

    bumps: list[BumpSpec] = Field(default_factory=list)
    background: float = Field(default=0.0, ge=0, description="Uniform density offset")


class InitialCondition(BaseModel):
    """Sum of periodic Gaussian bumps per species"""

    model_config = ConfigDict(frozen=True)

    species: list[SpeciesInitial] = Field(
        default_factory=lambda: [
            SpeciesInitial(bumps=[BumpSpec(center=[-2.0], width=2.0, amplitude=1.0)]),
            SpeciesInitial(bumps=[BumpSpec(center=[2.0], width=2.5, amplitude=1.0)]),
        ]
    )


class StudySettings(BaseModel):
    """Sample sizes and probes of the diagnostic experiments"""

    model_config = ConfigDict(frozen=True)

    sampler_count: int = Field(default=10**6, ge=10**3)
    sampler_xi: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 4.0])
    sampler_dt: float = Field(default=0.01, gt=0)
    tail_count: int = Field(default=10**7, ge=10**3)
    variance_seeds: int = Field(default=64, ge=2)
    variance_probe: list[float] = Field(default_factory=lambda: [0.0])
    bl_modes: int = Field(default=32, ge=1)
    bl_tents: int = Field(default=64, ge=1)


class OutputSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    out_dir: Path = Field(default=Path("runs"), description="Output directory")
    write_snapshots: bool = Field(
        default=True, description="Binary field snapshots of PDE runs"
    )
    write_dat: bool = Field(default=True, description="Two-column *.dat series")


def _default_model() -> ModelParams:
    return ModelParams(
        n=2,
        alpha=0.85,
        beta=0.5,
        sigma=[1.0, 1.0],
        a=[[0.5, -0.3], [0.2, 0.4]],
        d=1,
    )


class ExperimentConfig(BaseModel):
    """Complete configuration of one harness invocation"""

    model_config = ConfigDict(frozen=True)

    model: ModelParams = Field(default_factory=_default_model)
    scaling: ScalingSettings = Field(default_factory=ScalingSettings)
    grid: GridSettings = Field(default_factory=GridSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    particles: ParticleSettings = Field(default_factory=ParticleSettings)
    seeds: SeedSettings = Field(default_factory=SeedSettings)
    initial: InitialCondition = Field(default_factory=InitialCondition)
    study: StudySettings = Field(default_factory=StudySettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    threads: int = Field(default=1, ge=1, description="Worker threads")
    auto_scale_interaction: bool = Field(
        default=True, description="Halve a_ij while the small-data monitor trips"
    )
    max_scale_halvings: int = Field(default=4, ge=0)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode="after")
    def check_dimensions(self) -> "ExperimentConfig":
        d = self.model.d
        if self.grid.d != d:
            raise ValueError(f"grid.d={self.grid.d} differs from model.d={d}")
        if len(self.initial.species) != self.model.n:
            raise ValueError(
                f"initial condition lists {len(self.initial.species)} species, "
                f"model has n={self.model.n}"
            )
        for spec in self.initial.species:
            for bump in spec.bumps:
                if len(bump.center) != d:
                    raise ValueError(f"bump centre {bump.center} is not in R^{d}")
        if len(self.study.variance_probe) != d:
            raise ValueError("variance_probe must have one entry per axis")
        return self

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"Invalid experiment configuration: {e}") from e

    @classmethod
    def from_toml(cls, path: str | Path) -> "ExperimentConfig":
        """Read a ``key = value`` sectioned config mirroring this model"""
        path = Path(path)
        try:
            with path.open("rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError as e:
            raise ConfigError(f"Config file not found: {path}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"Malformed config file {path}: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_env(cls) -> "ExperimentConfig":
        """Config from XDIFF_CONFIG plus XDIFF_SEED / XDIFF_OUT / XDIFF_THREADS"""
        load_dotenv()
        path = os.getenv("XDIFF_CONFIG")
        cfg = cls.from_toml(path) if path else cls()
        seed = os.getenv("XDIFF_SEED")
        out = os.getenv("XDIFF_OUT")
        threads = os.getenv("XDIFF_THREADS")
        try:
            return cfg.with_overrides(
                seed=int(seed) if seed else None,
                out=Path(out) if out else None,
                threads=int(threads) if threads else None,
            )
        except ValueError as e:
            raise ConfigError(f"Invalid environment override: {e}") from e

    def with_overrides(
        self,
        seed: int | None = None,
        out: Path | None = None,
        threads: int | None = None,
        log_level: str | None = None,
    ) -> "ExperimentConfig":
        data = self.model_dump()
        if log_level is not None:
            data["logging"]["level"] = log_level
            for handler in data["logging"]["handlers"].values():
                handler["level"] = log_level
        if seed is not None:
            data["seeds"]["master_seed"] = seed
        if out is not None:
            data["output"]["out_dir"] = out
        if threads is not None:
            data["threads"] = threads
        return self.from_dict(data)

    def with_model(self, model: ModelParams) -> "ExperimentConfig":
        return self.model_copy(update={"model": model})

    def scaling_for(self, N: int) -> ScalingParams:
        return self.scaling.params_for(N, self.model.d)

    def hs_order(self) -> float:
        if self.solver.hs_order is not None:
            return self.solver.hs_order
        return self.model.d / 2.0 + 2.5

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of everything that affects results"""
        payload = self.model_dump(
            mode="json", exclude={"logging", "output", "threads"}
        )
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
