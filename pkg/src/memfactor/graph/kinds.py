"""Variable kinds (alphabets) and their mismatch costs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from memfactor.validation import NetworkValidationError


@dataclass(frozen=True)
class RealKind:
    """Real-valued variable, quadratic mismatch cost.

    `nonneg` bounds the alphabet below by 0; `upper` is an optional clamp
    applied only when values are serialized (e.g. image bytes).
    """

    nonneg: bool = True
    upper: float | None = None

    def contains(self, value: Any) -> bool:
        if np.iscomplexobj(value) or not np.isfinite(value):
            return False
        return not (self.nonneg and value < 0)


@dataclass(frozen=True)
class IntegerKind:
    """Integer variable, absolute mismatch cost. Optional inclusive range."""

    low: int | None = None
    high: int | None = None

    def __post_init__(self) -> None:
        if self.low is not None and self.high is not None and self.low > self.high:
            raise NetworkValidationError(f"Integer range is empty: [{self.low}, {self.high}]")

    def contains(self, value: Any) -> bool:
        if np.iscomplexobj(value) or not np.isfinite(value) or value != int(value):
            return False
        if self.low is not None and value < self.low:
            return False
        return not (self.high is not None and value > self.high)


@dataclass(frozen=True)
class LabelKind:
    """Categorical variable over {0..size-1}, indicator mismatch cost."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise NetworkValidationError(f"Label domain size must be >= 2, got {self.size}")

    def contains(self, value: Any) -> bool:
        if np.iscomplexobj(value) or not np.isfinite(value) or value != int(value):
            return False
        return 0 <= value < self.size


@dataclass(frozen=True)
class ComplexKind:
    """Complex-valued variable (spectrogram cell), squared-modulus mismatch cost."""

    def contains(self, value: Any) -> bool:
        return bool(np.isfinite(value))


VariableKind = RealKind | IntegerKind | LabelKind | ComplexKind

QUADRATIC_KINDS = (RealKind, ComplexKind)


def mismatch(kind: VariableKind, x: Any, v: Any) -> float:
    """Mismatch between a value and a vote, before edge weighting."""
    match kind:
        case RealKind() | ComplexKind():
            return float(abs(x - v) ** 2)
        case IntegerKind():
            return float(abs(x - v))
        case LabelKind():
            return 0.0 if int(x) == int(v) else 1.0
    raise NetworkValidationError(f"Unknown variable kind: {kind!r}")


def kind_code(kind: VariableKind) -> int:
    """Stable one-byte code used by binary model files."""
    match kind:
        case RealKind():
            return 0
        case IntegerKind():
            return 1
        case LabelKind():
            return 2
        case ComplexKind():
            return 3
    raise NetworkValidationError(f"Unknown variable kind: {kind!r}")


def kind_to_dict(kind: VariableKind) -> dict[str, Any]:
    match kind:
        case RealKind(nonneg=nonneg, upper=upper):
            return {"type": "real", "nonneg": nonneg, "upper": upper}
        case IntegerKind(low=low, high=high):
            return {"type": "integer", "low": low, "high": high}
        case LabelKind(size=size):
            return {"type": "label", "size": size}
        case ComplexKind():
            return {"type": "complex"}
    raise NetworkValidationError(f"Unknown variable kind: {kind!r}")


def kind_from_dict(data: dict[str, Any]) -> VariableKind:
    match data.get("type"):
        case "real":
            return RealKind(nonneg=data.get("nonneg", True), upper=data.get("upper"))
        case "integer":
            return IntegerKind(low=data.get("low"), high=data.get("high"))
        case "label":
            return LabelKind(size=int(data["size"]))
        case "complex":
            return ComplexKind()
    raise NetworkValidationError(f"Unknown variable kind document: {data!r}")


def vote_dtype(kinds: tuple[VariableKind, ...] | list[VariableKind]) -> type:
    """complex128 if any column is complex, float64 otherwise."""
    return np.complex128 if any(isinstance(k, ComplexKind) for k in kinds) else np.float64
