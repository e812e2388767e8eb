"""Reconstruction and classification metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from memfactor.engine.state import RunResult
from memfactor.io.csvio import write_csv_rows
from memfactor.io.images import to_bytes
from memfactor.validation import ValidationError


@dataclass
class Metrics:
    """Run metrics; fields a command never measured stay None and are left out of rows()."""

    mse: float | None = None
    """Mean squared error over in-region float values."""
    l1_total: float | None = None
    """Sum of absolute byte differences."""
    l1_per_pixel_channel: float | None = None
    perfect_restore: bool | None = None
    accuracy: float | None = None
    iterations: float = 0.0
    opinion_updates: float = 0.0
    rollbacks: float = 0.0
    rollback_rate: float = 0.0
    extra: dict[str, float] = field(default_factory=dict)

    def with_run(self, result: RunResult) -> Metrics:
        self.iterations = float(result.stats.iterations)
        self.opinion_updates = float(result.stats.opinion_updates)
        self.rollbacks = float(result.stats.rollbacks)
        self.rollback_rate = result.stats.rollback_rate
        self.extra["votes_retracted"] = float(result.stats.votes_retracted)
        self.extra["simultaneous_votes"] = float(result.stats.simultaneous_votes)
        return self

    def rows(self) -> list[tuple[str, object]]:
        data = asdict(self)
        extra = data.pop("extra")
        rows = [(k, v) for k, v in data.items() if v is not None]
        return rows + sorted(extra.items())


def _check_shapes(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValidationError(f"Shape mismatch: {a.shape} vs {b.shape}")


def image_metrics(original: np.ndarray, reconstruction: np.ndarray, region: np.ndarray | None = None) -> Metrics:
    """Compare two H x W x C float images in [0, 1].

    MSE is taken over the pixels in `region` (an H x W mask, default all);
    L1 compares the byte values both images would be written as.
    """
    a = np.asarray(original, dtype=np.float64)
    b = np.asarray(reconstruction, dtype=np.float64)
    _check_shapes(a, b)
    if a.ndim == 2:
        a, b = a[:, :, None], b[:, :, None]
    mask = np.ones(a.shape[:2], dtype=bool) if region is None else np.asarray(region, dtype=bool)
    if mask.shape != a.shape[:2]:
        raise ValidationError(f"Region mask {mask.shape} does not match image {a.shape[:2]}")

    diff = a[mask] - b[mask]
    mse = float(np.mean(diff**2)) if diff.size else 0.0
    bytes_a = to_bytes(a[mask]).astype(np.int64)
    bytes_b = to_bytes(b[mask]).astype(np.int64)
    l1 = float(np.abs(bytes_a - bytes_b).sum())
    per = l1 / bytes_a.size if bytes_a.size else 0.0
    return Metrics(mse=mse, l1_total=l1, l1_per_pixel_channel=per, perfect_restore=l1 == 0)


def byte_metrics(original: np.ndarray, reconstruction: np.ndarray) -> Metrics:
    """Compare two uint8 images directly."""
    a = np.asarray(original)
    b = np.asarray(reconstruction)
    _check_shapes(a, b)
    return image_metrics(a.astype(np.float64) / 255.0, b.astype(np.float64) / 255.0)


def accuracy(predicted: list[int], truth: list[int]) -> float:
    if len(predicted) != len(truth):
        raise ValidationError(f"{len(predicted)} predictions for {len(truth)} labels")
    if not truth:
        return 0.0
    return sum(int(p == t) for p, t in zip(predicted, truth, strict=True)) / len(truth)


def _mean(values: list[float | None]) -> float | None:
    if any(v is None for v in values):
        return None
    return sum(v for v in values if v is not None) / len(values)


def mean_metrics(items: list[Metrics]) -> Metrics:
    """Average over trials.

    perfect_restore becomes "all perfect", the fraction perfect goes to
    extra["fraction_perfect"], and the rollback rate is pooled over all
    attempted simultaneous votes. A field unmeasured in any trial stays None.
    """
    if not items:
        raise ValidationError("No metrics to aggregate")
    n = len(items)
    perfect = [m.perfect_restore for m in items]
    measured = all(p is not None for p in perfect)
    out = Metrics(
        mse=_mean([m.mse for m in items]),
        l1_total=_mean([m.l1_total for m in items]),
        l1_per_pixel_channel=_mean([m.l1_per_pixel_channel for m in items]),
        perfect_restore=all(perfect) if measured else None,
        iterations=sum(m.iterations for m in items) / n,
        opinion_updates=sum(m.opinion_updates for m in items) / n,
        rollbacks=sum(m.rollbacks for m in items) / n,
    )
    attempted = sum(m.extra.get("simultaneous_votes", 0.0) for m in items)
    retracted = sum(m.extra.get("votes_retracted", 0.0) for m in items)
    out.rollback_rate = retracted / attempted if attempted else 0.0
    if measured:
        out.extra["fraction_perfect"] = sum(bool(p) for p in perfect) / n
    out.extra["trials"] = float(n)
    return out


def write_metrics_csv(path: Path | str, metrics: Metrics) -> Path:
    return write_csv_rows(path, ["metric", "value"], metrics.rows())
