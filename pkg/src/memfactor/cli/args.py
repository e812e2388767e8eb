"""CLI argument dataclasses for tyro."""

from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Literal, Union

import tyro

Task = Literal["inpaint", "drop", "noise", "colorize", "music_gap", "music_denoise", "classify", "restore"]


@dataclass(kw_only=True)
class RunFlags:
    """Experiment knobs shared by every command. Flags override the run-config."""

    config: Path | None = None
    """JSON run-config (defaults apply when omitted)."""

    output_dir: Path | None = None
    """Directory for reconstructions, metrics.csv and RUN_SUMMARY.md."""

    evidence_weight: float | None = None
    """Weight of evidence factors (default depends on the task)."""

    factor_weight: float | None = None
    """Weight of memory factors."""

    schedule: str | None = None
    """'serial' or 'simul:<f>' to let the top fraction f of dissatisfied factors vote together."""

    no_rollback: bool = False
    """Keep simultaneous steps even when they raise the cost tuple."""

    max_iterations: int | None = None
    """PMP iteration cap (default: 10 x number of factors)."""

    lam: Annotated[float | None, tyro.conf.arg(name="lambda")] = None
    """Subspace confidence trade-off between match and information."""

    alpha: float | None = None
    """Subspace satisfaction threshold."""

    hidden_p: int | None = None
    """Hidden dimension of subspace factors."""

    seed: int | None = None
    """Seed for training subsamples, corruption and tie-breaking."""

    trace: bool = False
    """Write per-iteration cost tuples to trace.csv in the output directory."""

    jobs: int = 1
    """Independent trials or images to run in parallel."""

    verbose: bool = False
    """Log at DEBUG level."""

    summary_versioned: bool = False
    """Keep a previous RUN_SUMMARY.md as RUN_SUMMARY.<n>.md instead of overwriting it."""


@dataclass
class TrainArgs(RunFlags):
    """Train factor payloads and write a model directory.

    Image tasks read *.ppm files, classification reads *.pgm digits plus
    labels.csv, and music tasks read *.wav clips from the training directory.
    """

    task: Task | None = None
    """Task whose layout is trained (default: from the run-config)."""

    trainer: Literal["table", "nmf", "pca"] | None = None
    """Payload trainer (default: from the run-config)."""

    train_dir: Path | None = None
    """Training files (default: from the run-config)."""

    model_dir: Path | None = None
    """Where to write payloads and model.json (default: from the run-config)."""


@dataclass
class InferArgs(RunFlags):
    """Reconstruct an image or spectrogram with a trained model."""

    input: Annotated[Path, tyro.conf.Positional]
    """Input image (.ppm/.pgm) or audio/spectrogram (.wav/.mfns)."""

    task: Task | None = None
    """Reconstruction task (default: from the run-config)."""

    model_dir: Path | None = None
    """Trained model directory (default: from the run-config)."""

    mask: Path | None = None
    """PGM mask for inpainting; nonzero pixels are missing."""

    mask_rect: tuple[int, int, int, int] | None = None
    """Inpainting rectangle X0 Y0 X1 Y1 (end-exclusive) instead of a mask file."""

    drop_fraction: float = 0.5
    """Fraction of variables without evidence for the drop task."""

    noise_sigma: float | None = None
    """Gaussian noise on the 0-255 scale (default: 20 for noise and music_denoise, 40 for restore)."""

    gap: tuple[int, int] | None = None
    """Frames T0 T1 (end-exclusive) to reconstruct for music_gap (default: the middle tenth)."""


@dataclass
class ClassifyArgs(RunFlags):
    """Classify 28x28 digits with a trained hierarchy."""

    input: Annotated[Path, tyro.conf.Positional]
    """Directory of *.pgm digits, with an optional labels.csv (filename,label)."""

    model_dir: Path | None = None
    """Trained hierarchy (default: from the run-config)."""


@dataclass
class BenchmarkArgs(RunFlags):
    """Corrupted-image restoration benchmark over stored images."""

    trials: int = 50
    """Number of corrupted images to restore."""

    stored: int = 200
    """Synthetic images to store when the run-config names no training directory."""

    sigma: float = 40.0
    """Gaussian noise on the 0-255 scale."""

    blob: int = 36
    """Pixels erased per trial."""

    model_dir: Path | None = None
    """Reuse a trained table model instead of training on the stored images."""


@dataclass
class EvalArgs:
    """Compare a reconstruction against the original."""

    original: Annotated[Path, tyro.conf.Positional]
    """Original image (.ppm/.pgm) or spectrogram (.mfns)."""

    reconstruction: Annotated[Path, tyro.conf.Positional]
    """Reconstruction in the same format."""

    region: Path | None = None
    """PGM mask limiting the MSE to nonzero pixels."""

    output_dir: Path | None = None
    """Also write metrics.csv and RUN_SUMMARY.md here."""


@dataclass
class SynthArgs:
    """Write the synthetic datasets: faces (*.ppm), digits (*.pgm + labels.csv), music (*.wav)."""

    output: Annotated[Path, tyro.conf.Positional]
    """Output directory; each dataset goes to its own subdirectory."""

    kind: Literal["faces", "digits", "music", "all"] = "all"
    """Which dataset to write."""

    count: int = 20
    """Images, digits or music clips to write."""

    size: int = 16
    """Face image side in pixels."""

    seed: int = 0
    """Generator seed."""


# Main CLI type - Union of all commands
# Use directly with tyro.cli() for clean subcommand syntax: `memfactor infer face.ppm --task inpaint`
Args = Union[
    Annotated[TrainArgs, tyro.conf.subcommand(name="train")],
    Annotated[InferArgs, tyro.conf.subcommand(name="infer")],
    Annotated[ClassifyArgs, tyro.conf.subcommand(name="classify")],
    Annotated[BenchmarkArgs, tyro.conf.subcommand(name="benchmark")],
    Annotated[EvalArgs, tyro.conf.subcommand(name="eval")],
    Annotated[SynthArgs, tyro.conf.subcommand(name="synth")],
]
