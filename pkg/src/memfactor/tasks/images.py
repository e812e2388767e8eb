"""Image reconstruction tasks: inpainting, dropped or noisy evidence,
colorization, and the corrupted-image restoration benchmark.

Images are H x W x 3 float arrays in [0, 1]. Masks are H x W (per pixel) or
match the layout's variable vector (per variable); True marks a missing value.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from memfactor.engine import RunResult, Schedule, TraceRecorder
from memfactor.factors.base import FactorPayload
from memfactor.graph.network import Network
from memfactor.io.images import gray_of_rgb, match_gray
from memfactor.layouts.image import ImageLayout, image_variables
from memfactor.log import log
from memfactor.metrics import Metrics, image_metrics, mean_metrics
from memfactor.tasks.common import run_with_evidence
from memfactor.training import TrainerSpec, TrainingReport, train_network
from memfactor.validation import LayoutError, ValidationError

BENCHMARK_NOISE_SIGMA = 40.0
"""Gaussian noise standard deviation, in byte units."""
BENCHMARK_BLOB_PIXELS = 36


@dataclass
class ImageTaskResult:
    reconstruction: np.ndarray
    """H x W x C floats; C follows the layout (gray included for rgb+gray)."""
    run: RunResult
    metrics: Metrics


def image_samples(layout: ImageLayout, images: np.ndarray) -> np.ndarray:
    """m x N variable matrix of training images."""
    return np.stack([image_variables(layout, img) for img in np.asarray(images)])


def train_image_model(
    layout: ImageLayout,
    images: np.ndarray,
    spec: TrainerSpec,
) -> tuple[dict[str, FactorPayload], list[TrainingReport]]:
    return train_network(layout.network, image_samples(layout, images), spec)


# --- Masks and corruption ---


def rect_mask(height: int, width: int, x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    """H x W mask, True inside [x0, x1) x [y0, y1)."""
    if not (0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height):
        raise ValidationError(f"Rectangle ({x0},{y0})-({x1},{y1}) is not inside {width}x{height}")
    mask = np.zeros((height, width), dtype=bool)
    mask[y0:y1, x0:x1] = True
    return mask


def drop_mask(n_variables: int, fraction: float, seed: int = 0) -> np.ndarray:
    """Per-variable mask with round(fraction * n) randomly chosen entries."""
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError(f"Drop fraction must be in [0, 1], got {fraction}")
    mask = np.zeros(n_variables, dtype=bool)
    count = int(round(fraction * n_variables))
    mask[np.random.default_rng(seed).choice(n_variables, size=count, replace=False)] = True
    return mask


def add_noise(image: np.ndarray, sigma_bytes: float, seed: int = 0) -> np.ndarray:
    """Gaussian noise of `sigma_bytes` (0-255 scale) on every value, clipped to [0, 1]."""
    arr = np.asarray(image, dtype=np.float64)
    if sigma_bytes == 0:
        return arr.copy()
    noise = np.random.default_rng(seed).normal(0.0, sigma_bytes / 255.0, size=arr.shape)
    return np.clip(arr + noise, 0.0, 1.0)


def erase_blob(height: int, width: int, size: int = BENCHMARK_BLOB_PIXELS, seed: int = 0) -> np.ndarray:
    """Connected blob of exactly `size` pixels grown from the center.

    Each step picks a blob pixel and a direction at random and adds the
    neighbor if it is new and inside the image.
    """
    if size < 0 or size > height * width:
        raise ValidationError(f"Blob of {size} pixels does not fit a {width}x{height} image")
    mask = np.zeros((height, width), dtype=bool)
    if size == 0:
        return mask
    rng = np.random.default_rng(seed)
    pixels = [(height // 2, width // 2)]
    mask[pixels[0]] = True
    steps = ((-1, 0), (1, 0), (0, -1), (0, 1))
    while len(pixels) < size:
        r, c = pixels[int(rng.integers(len(pixels)))]
        dr, dc = steps[int(rng.integers(4))]
        nr, nc = r + dr, c + dc
        if 0 <= nr < height and 0 <= nc < width and not mask[nr, nc]:
            mask[nr, nc] = True
            pixels.append((nr, nc))
    return mask


def _variable_mask(layout: ImageLayout, mask: np.ndarray | None) -> np.ndarray:
    grid = layout.grid
    if mask is None:
        return np.zeros(grid.size, dtype=bool)
    m = np.asarray(mask, dtype=bool)
    if m.shape == (grid.height, grid.width):
        return np.tile(m.reshape(-1), grid.channels)
    if m.shape == (grid.size,):
        return m
    raise LayoutError(f"Mask shape {m.shape} fits neither the image nor the {grid.size} variables")


def mean_fill(image: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Baseline: missing pixels take their channel's mean over observed pixels."""
    arr = np.asarray(image, dtype=np.float64).copy()
    m = np.asarray(mask, dtype=bool)
    for ch in range(arr.shape[2]):
        observed = arr[..., ch][~m]
        arr[..., ch][m] = observed.mean() if observed.size else 0.0
    return arr


# --- Reconstruction ---


def reconstruct(
    layout: ImageLayout,
    bound: Network,
    image: np.ndarray,
    missing: np.ndarray | None,
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
    evidence_channels: list[int] | None = None,
) -> tuple[np.ndarray, RunResult]:
    """Run PMP with evidence on every observed variable and return the image.

    Args:
        bound: `layout.network` bound to its payloads.
        image: Evidence image (H x W x 3, or with gray for rgb+gray layouts).
        missing: Pixel or variable mask of values that get no evidence.
        evidence_channels: Only these channels carry evidence (colorization).

    Variables that end up Unknown keep their evidence value; those without
    evidence take the observed mean of their channel, as `mean_fill` does.
    """
    values = image_variables(layout, image)
    skip = _variable_mask(layout, missing)
    if evidence_channels is not None:
        grid = layout.grid
        per_channel = grid.width * grid.height
        allowed = np.zeros(grid.size, dtype=bool)
        for ch in evidence_channels:
            allowed[ch * per_channel : (ch + 1) * per_channel] = True
        skip = skip | ~allowed
    observations = {int(i): float(values[i]) for i in np.flatnonzero(~skip)}
    _, run = run_with_evidence(bound, observations, weight, schedule, workers, trace)
    filled = run.assignment.filled(_fallback(layout, values, skip))
    return layout.grid.to_image(np.real(filled)), run


def _fallback(layout: ImageLayout, values: np.ndarray, skip: np.ndarray) -> np.ndarray:
    """Evidence values, with each unobserved variable at its channel's observed mean.

    A channel with no evidence at all (colorization's RGB) takes the mean over
    every observed variable.
    """
    per_channel = layout.grid.width * layout.grid.height
    out = np.where(skip, 0.0, values)
    overall = float(values[~skip].mean()) if (~skip).any() else 0.0
    for ch in range(layout.grid.channels):
        sl = slice(ch * per_channel, (ch + 1) * per_channel)
        observed = values[sl][~skip[sl]]
        out[sl][skip[sl]] = observed.mean() if observed.size else overall
    return out


def inpaint(
    layout: ImageLayout,
    bound: Network,
    image: np.ndarray,
    mask: np.ndarray,
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> ImageTaskResult:
    """Fill the masked pixels; metrics compare against `image` over the mask."""
    out, run = reconstruct(layout, bound, image, mask, weight, schedule, workers, trace)
    truth = _with_layout_channels(layout, image)
    region = np.asarray(mask, dtype=bool)
    if region.shape != truth.shape[:2]:
        region = None
    return ImageTaskResult(out, run, image_metrics(truth, out, region).with_run(run))


def denoise(
    layout: ImageLayout,
    bound: Network,
    clean: np.ndarray,
    noisy: np.ndarray,
    missing: np.ndarray | None,
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> ImageTaskResult:
    """Reconstruct from noisy and/or partially dropped evidence; metrics against `clean`."""
    out, run = reconstruct(layout, bound, noisy, missing, weight, schedule, workers, trace)
    truth = _with_layout_channels(layout, clean)
    return ImageTaskResult(out, run, image_metrics(truth, out).with_run(run))


def colorize(
    layout: ImageLayout,
    bound: Network,
    image: np.ndarray,
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> ImageTaskResult:
    """Recover color from the gray channel alone, then rescale to match it.

    The layout must carry a gray channel (rgb+gray). Metrics compare the
    RGB output against `image`.
    """
    if layout.spec.channels != "rgb+gray":
        raise LayoutError("Colorization needs an rgb+gray layout")
    rgb = np.asarray(image, dtype=np.float64)[..., :3]
    gray = gray_of_rgb(rgb[..., 0], rgb[..., 1], rgb[..., 2])
    out, run = reconstruct(layout, bound, rgb, None, weight, schedule, workers, trace, evidence_channels=[3])
    colored = np.clip(match_gray(out[..., :3], gray), 0.0, 1.0)
    return ImageTaskResult(colored, run, image_metrics(rgb, colored).with_run(run))


def _with_layout_channels(layout: ImageLayout, image: np.ndarray) -> np.ndarray:
    return layout.grid.to_image(image_variables(layout, image))


# --- Restoration benchmark ---


def restore_trial(
    layout: ImageLayout,
    bound: Network,
    stored: np.ndarray,
    trial_seed: int,
    schedule: Schedule,
    sigma_bytes: float = BENCHMARK_NOISE_SIGMA,
    blob_pixels: int = BENCHMARK_BLOB_PIXELS,
    weight: float = 0.01,
    workers: int = 1,
) -> Metrics:
    """Corrupt one stored image (noise + erased blob) and try to restore it."""
    rng = np.random.default_rng(trial_seed)
    index = int(rng.integers(len(stored)))
    noise_seed, blob_seed = (int(s) for s in rng.integers(0, 2**31, size=2))
    clean = np.asarray(stored[index], dtype=np.float64)
    noisy = add_noise(clean, sigma_bytes, noise_seed)
    blob = erase_blob(clean.shape[0], clean.shape[1], blob_pixels, blob_seed)
    result = denoise(layout, bound, clean, noisy, blob, weight, schedule, workers)
    log.debug(f"restore trial {trial_seed}: image {index}, L1 {result.metrics.l1_total:.0f}")
    result.metrics.extra["image_index"] = float(index)
    return result.metrics


def benchmark_restore(
    layout: ImageLayout,
    bound: Network,
    stored: np.ndarray,
    n_trials: int,
    seed: int,
    schedule: Schedule,
    sigma_bytes: float = BENCHMARK_NOISE_SIGMA,
    blob_pixels: int = BENCHMARK_BLOB_PIXELS,
    weight: float = 0.01,
    jobs: int = 1,
    workers: int = 1,
) -> tuple[Metrics, list[Metrics]]:
    """Repeat `restore_trial`; trial t uses seed `seed + t`, so results do not
    depend on `jobs`.

    Raises:
        ValidationError: If n_trials < 1.
    """
    if n_trials < 1:
        raise ValidationError(f"n_trials must be >= 1, got {n_trials}")

    def trial(t: int) -> Metrics:
        return restore_trial(layout, bound, stored, seed + t, schedule, sigma_bytes, blob_pixels, weight, workers)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix="mfn-trial") as pool:
            trials = list(pool.map(trial, range(n_trials)))
    else:
        trials = [trial(t) for t in range(n_trials)]
    return mean_metrics(trials), trials
