"""Configuration management for bregman-rates."""

import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings

from .exponents import check_admissible
from .models import MEASURES, Measure, Regime
from .regularisers import RegulariserSpec
from .sources import OperatorPreset

DEFAULT_TOLERANCE = 0.15


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Runs
    seed: Optional[int] = Field(None, description="Overrides every run config seed")
    jobs: int = Field(1, ge=1, description="Worker threads for sweep grid points")

    # Paths
    out_dir: Path = Field(Path("results"), description="Default output directory")
    config_dir: Path = Field(Path("config"), description="Run config directory")

    # Logging
    log_level: str = Field("INFO", description="Logging level")
    log_format: str = Field("console", description="Logging format (json or console)")

    model_config = {
        "env_prefix": "BREGMAN_RATES_",
        "env_file": ".env",
        "extra": "ignore",
    }


class SolverSettings(BaseModel):
    """Solver options as they appear in run configs."""

    model_config = ConfigDict(extra="forbid")

    max_iterations: int = Field(20000, ge=1)
    kkt_tolerance: float = Field(1e-9, gt=0.0)
    step_scale: float = Field(1.0, gt=0.0, le=1.0)
    restart: bool = True
    metric: Literal["diagonal", "scalar"] = Field(
        "diagonal", description="Forward-backward metric for separable regularisers"
    )


class ExperimentConfig(BaseModel):
    """One noise-level sweep: operator, regulariser, source exponent and grid."""

    model_config = ConfigDict(extra="forbid")

    operator: OperatorPreset
    regulariser: RegulariserSpec
    nu: float = Field(..., description="Source exponent")
    regime: Regime

    delta_max: float = Field(1e-2, gt=0.0)
    delta_min: float = Field(1e-5, gt=0.0)
    delta_count: int = Field(10, ge=4)
    alpha_constant: float = Field(1.0, gt=0.0, description="c in alpha = c delta^theta")
    seed: int = Field(0, description="Noise seed; per-point seeds derive from it")
    fit_window: Optional[Tuple[int, int]] = Field(
        None, description="Grid indices [start, stop) used for slope fits"
    )
    measures: List[Measure] = Field(default_factory=lambda: list(MEASURES))

    noise_model: Literal["gaussian", "worst_case"] = "gaussian"
    omega: Literal["alternating", "random"] = "alternating"
    omega_norm: float = Field(1.0, gt=0.0)
    synthesize: bool = Field(True, description="Build the truth from a source element")
    u_dagger: Optional[List[float]] = Field(
        None, description="Truth for observational sweeps; default is a unit step"
    )
    solver: Literal["auto", "iterative", "direct"] = "auto"
    solve_options: SolverSettings = Field(default_factory=SolverSettings)
    oracle_alpha: bool = Field(False, description="Record the best alpha per point")

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if not self.delta_max > self.delta_min:
            raise ValueError("delta grid must decrease: delta_max > delta_min")
        start, stop = self.window
        if not 0 <= start < stop <= self.delta_count or stop - start < 3:
            raise ValueError(
                f"fit_window {list(self.window)} must select at least 3 of "
                f"{self.delta_count} grid points"
            )
        check_admissible(self.regime, self.nu)
        if self.solver == "direct" and self.regulariser.kind != "quadratic":
            raise ValueError("the direct solver needs the quadratic regulariser")
        if len(set(self.measures)) != len(self.measures):
            raise ValueError("measures must not repeat")
        return self

    @property
    def window(self) -> Tuple[int, int]:
        """Fit window, by default dropping the first and last grid point."""
        if self.fit_window is None:
            return 1, self.delta_count - 1
        return self.fit_window


class RunConfigFile(ExperimentConfig):
    """A run config on disk: an experiment plus output paths and tolerances."""

    out_dir: Optional[Path] = None
    csv_name: str = "results.csv"
    report_name: str = "report.json"
    tolerances: Dict[Measure, float] = Field(default_factory=dict)

    def tolerance(self, measure: str) -> float:
        tolerances: Dict[str, float] = dict(self.tolerances)
        return tolerances.get(measure, DEFAULT_TOLERANCE)


class ConfigManager:
    """Manages run-config loading and caching."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self._cache: Dict[Path, RunConfigFile] = {}

    def resolve(self, path: Path) -> Path:
        """Resolve bare file names against the config directory."""
        if path.exists() or path.is_absolute():
            return path
        candidate = self.settings.config_dir / path
        return candidate if candidate.exists() else path

    def read_raw(self, path: Path) -> Dict[str, Any]:
        """Parse a JSON or YAML run config without validating it."""
        path = self.resolve(Path(path))
        if not path.exists():
            raise FileNotFoundError(f"Run config file not found: {path}")

        with open(path, "r") as f:
            if path.suffix in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)

        if not isinstance(data, dict):
            raise ValueError(f"Run config {path} must contain a mapping at top level")
        return data

    def load_run_config(self, path: Path, force_reload: bool = False) -> RunConfigFile:
        """Load and validate a run config, applying the seed override."""
        key = self.resolve(Path(path))
        if key in self._cache and not force_reload:
            return self._cache[key]

        data = self.read_raw(key)
        if self.settings.seed is not None:
            data["seed"] = self.settings.seed
        config = RunConfigFile.model_validate(data)

        self._cache[key] = config
        return config

    def list_run_configs(self) -> list[str]:
        """List run config files shipped in the config directory."""
        if not self.settings.config_dir.is_dir():
            return []
        return sorted(
            p.name
            for p in self.settings.config_dir.iterdir()
            if p.suffix in (".json", ".yaml", ".yml")
        )

    def reload_config(self) -> None:
        self._cache.clear()


# Global config manager instance
config_manager = ConfigManager()


def get_settings() -> Settings:
    """Get application settings."""
    return config_manager.settings
