"""Error types and input validation for memfactor.

Validates inputs early to fail fast with clear error messages. Every error
the library raises derives from `MemfactorError`, and the CLI maps the
families below to exit codes (validation 2, non-convergence 3, format/IO 4).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from memfactor.engine.state import RunResult


class MemfactorError(Exception):
    """Base class for all memfactor errors."""

    pass


# --- Validation family (exit code 2) ---


class ValidationError(MemfactorError):
    """Raised when validation fails."""

    pass


class NetworkValidationError(ValidationError):
    """Raised when a network violates a structural invariant at build time."""

    pass


class KernelValidationError(ValidationError):
    """Raised when votes handed to a variable kernel are malformed."""

    pass


class LayoutError(ValidationError):
    """Raised when a layout spec cannot produce a network."""

    pass


class TrainingError(ValidationError):
    """Raised when exemplars cannot be turned into a payload."""

    pass


class SignalError(ValidationError):
    """Raised for invalid spectrogram inputs."""

    pass


class ConfigError(ValidationError):
    """Raised when a run-config fails schema validation."""

    pass


class StructuralError(ValidationError):
    """Raised when a factor payload is missing, empty or indexed out of range."""

    pass


class InfeasibleVoteError(ValidationError):
    """Raised when a vote vector has infinite selection cost."""

    def __init__(self, factor_id: int, message: str | None = None):
        self.factor_id = factor_id
        super().__init__(message or f"Vote of factor {factor_id} violates its selection constraint (infinite cost)")


# --- Non-convergence (exit code 3) ---


class NonConvergedError(MemfactorError):
    """Raised when PMP hits max_iterations; carries the best-so-far result."""

    def __init__(self, result: RunResult):
        self.result = result
        super().__init__(f"PMP did not converge within {result.stats.iterations} iterations")


# --- Format / IO family (exit code 4) ---


class FormatError(MemfactorError):
    """Raised when a file cannot be decoded."""

    pass


class ImageHeaderError(FormatError):
    """Malformed PPM/PGM header."""

    pass


class ImageMaxvalError(FormatError):
    """PPM/PGM maxval other than 255."""

    pass


class ImageTruncatedError(FormatError):
    """PPM/PGM payload shorter than the header promises."""

    pass


class RaggedCsvError(FormatError):
    """CSV rows of unequal length or non-numeric cells."""

    pass


class ChecksumError(FormatError):
    """Stored checksum does not match the payload bytes."""

    pass


class ModelFormatError(FormatError):
    """Bad magic, unsupported version or inconsistent model header."""

    pass


class WavFormatError(FormatError):
    """Audio that is not 16-bit PCM mono WAV."""

    pass


# --- Validators ---


def validate_positive(name: str, value: float) -> None:
    """Validate that a numeric parameter is finite and strictly positive.

    Raises:
        ValidationError: If the value is not > 0 or not finite.
    """
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value}")


def validate_fraction(name: str, value: float) -> None:
    """Validate a fraction in (0, 1].

    Raises:
        ValidationError: If the value falls outside (0, 1].
    """
    if not (0.0 < value <= 1.0):
        raise ValidationError(f"{name} must be in (0, 1], got {value}")


def validate_probability(name: str, value: float) -> None:
    """Validate a probability in [0, 1]."""
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must be in [0, 1], got {value}")


def validate_weights(weights: Sequence[float]) -> None:
    """Validate that edge weights are finite and nonnegative.

    Raises:
        ValidationError: If any weight is negative or not finite.
    """
    for w in weights:
        if not math.isfinite(w) or w < 0:
            raise ValidationError(f"Edge weights must be finite and nonnegative, got {w}")


def parse_schedule(text: str) -> tuple[str, float]:
    """Parse a `--schedule` value.

    Args:
        text: "serial" or "simul:<f>" with f in (0, 1].

    Returns:
        ("serial", 1.0) or ("simultaneous", f).

    Raises:
        ValidationError: If the value cannot be parsed.

    Examples:
        >>> parse_schedule("serial")
        ('serial', 1.0)
        >>> parse_schedule("simul:0.1")
        ('simultaneous', 0.1)
    """
    text = text.strip().lower()
    if text == "serial":
        return "serial", 1.0
    if text.startswith("simul:"):
        try:
            fraction = float(text.split(":", 1)[1])
        except ValueError as e:
            raise ValidationError(f"Invalid schedule fraction in '{text}'") from e
        validate_fraction("schedule fraction", fraction)
        return "simultaneous", fraction
    raise ValidationError(f"Invalid schedule '{text}'. Expected 'serial' or 'simul:<f>' with f in (0, 1]")
