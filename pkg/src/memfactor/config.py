"""Settings and run-config models using pydantic / pydantic-settings."""

import json
import sys
from pathlib import Path
from typing import ClassVar, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from memfactor.validation import ConfigError


class Settings(BaseSettings):
    """Process-wide settings loaded from environment variables.

    Optional:
        MFN_THREADS: Cap on opinion/trial worker threads (default: 1)
        MFN_LOG_LEVEL: Console log level (DEBUG, INFO, WARN, ERROR)
        MFN_LOG_FILE: Also write timestamped DEBUG records to this file
    """

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_file=None,  # Only read from environment variables, not files
    )

    threads: int = Field(default=1, ge=1, validation_alias="MFN_THREADS")
    log_level: str = Field(default="WARN", validation_alias="MFN_LOG_LEVEL")
    log_file: Path | None = Field(default=None, validation_alias="MFN_LOG_FILE")

    @classmethod
    def from_env(cls) -> "Settings":
        try:
            return cls()
        except ValidationError as err:
            bad = [e["loc"][0] for e in err.errors()]
            sys.exit(f"Configuration error in {bad}: {err}")


class _Strict(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid")


class FactorSettings(_Strict):
    """Knobs shared by payload training and the opinion solvers."""

    lam: float = Field(default=1.0, gt=0)
    alpha: float | None = Field(default=None, gt=0)
    """Satisfaction threshold; None means 1e-4 times the factor degree."""
    hidden_p: int = Field(default=5, ge=1)
    subsample_prob: float = Field(default=1.0, ge=0, le=1)
    nmf_max_iters: int = Field(default=500, ge=1)
    nmf_tol: float = Field(default=1e-9, ge=0)
    nmf_restarts: int = Field(default=1, ge=1)
    qp_max_iters: int = Field(default=1000, ge=1)
    qp_tolerance: float = Field(default=1e-10, gt=0)
    confidence_penalty: Literal["per_variable", "unscaled"] = "per_variable"


class ImageLayoutSettings(_Strict):
    width: int = Field(default=16, ge=1)
    height: int = Field(default=16, ge=1)
    channels: Literal["mono", "rgb", "rgb+gray"] = "rgb"
    patch: int = 8
    stride: int = 4
    linked_patch: int = 4
    combined: bool = False
    """Single 192-variable color factors instead of per-channel + linked factors."""
    roi: tuple[int, int, int, int] | None = None
    """Region of interest as (x0, y0, x1, y1), end-exclusive."""


class SpectrogramSettings(_Strict):
    n_bins: int = Field(default=400, ge=1)
    factor_width: int = Field(default=10, ge=1)
    shared: bool = True
    frame_ms: float = Field(default=50.0, gt=0)
    hop_ms: float = Field(default=25.0, gt=0)


class ScheduleSettings(_Strict):
    mode: Literal["serial", "simultaneous"] = "serial"
    fraction: float = Field(default=0.1, gt=0, le=1)
    rollback: bool = True
    max_iterations: int | None = Field(default=None, ge=1)
    seed: int = 0


class WeightSettings(_Strict):
    evidence: float | None = Field(default=None, gt=0)
    """None picks the task default (see memfactor.tasks.DEFAULT_EVIDENCE_WEIGHT)."""
    factor: float = Field(default=1.0, ge=0)


class RunConfig(_Strict):
    """JSON run-config. Unknown keys are rejected at every level."""

    task: Literal[
        "inpaint",
        "drop",
        "noise",
        "colorize",
        "music_gap",
        "music_denoise",
        "classify",
        "restore",
    ] = "inpaint"
    trainer: Literal["table", "nmf", "pca"] = "table"
    image: ImageLayoutSettings = Field(default_factory=ImageLayoutSettings)
    spectrogram: SpectrogramSettings = Field(default_factory=SpectrogramSettings)
    schedule: ScheduleSettings = Field(default_factory=ScheduleSettings)
    weights: WeightSettings = Field(default_factory=WeightSettings)
    factor: FactorSettings = Field(default_factory=FactorSettings)
    seed: int = 0
    train_dir: Path | None = None
    model_dir: Path | None = None
    output_dir: Path = Path("out")

    @model_validator(mode="after")
    def _check_trainer(self) -> "RunConfig":
        if self.trainer == "pca" and self.task not in ("music_gap", "music_denoise"):
            raise ValueError("trainer 'pca' only applies to spectrogram tasks")
        return self


def load_config(path: Path) -> RunConfig:
    """Load and validate a JSON run-config.

    Raises:
        ConfigError: If the file is not JSON or fails schema validation. The
            message names the offending key path.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})") from e
    return validate_config(raw, str(path))


def validate_config(raw: object, source: str = "<config>") -> RunConfig:
    """Validate a decoded run-config (also used after CLI overrides)."""
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as err:
        first = err.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ConfigError(f"{source}: invalid key '{key}': {first['msg']}") from err
