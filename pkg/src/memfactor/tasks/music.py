"""Spectrogram tasks: filling a gap of frames and two-pass denoising."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from memfactor.engine import RunResult, Schedule, TraceRecorder
from memfactor.factors.base import FactorPayload
from memfactor.graph.network import Network
from memfactor.layouts.spectrogram import SpectrogramLayout
from memfactor.log import log
from memfactor.metrics import Metrics
from memfactor.signal import Spectrogram
from memfactor.tasks.common import DENOISE_SECOND_PASS_WEIGHT, run_with_evidence
from memfactor.training import TrainerSpec, TrainingReport, train_network, train_shared
from memfactor.validation import LayoutError, ValidationError


@dataclass
class MusicTaskResult:
    reconstruction: Spectrogram
    run: RunResult
    metrics: Metrics
    passes: list[RunResult]


def add_audio_noise(samples: np.ndarray, sigma_bytes: float, seed: int = 0) -> np.ndarray:
    """Gaussian noise of `sigma_bytes` / 255 of full scale on every sample, clipped to [-1, 1]."""
    x = np.asarray(samples, dtype=np.float64)
    noise = np.random.default_rng(seed).normal(0.0, sigma_bytes / 255.0, size=x.shape)
    return np.clip(x + noise, -1.0, 1.0)


def training_windows(specs: list[Spectrogram], n_frames: int) -> np.ndarray:
    """Cut training spectrograms into consecutive n_frames-wide chunks, one row each.

    Raises:
        ValidationError: If no spectrogram is long enough.
    """
    rows = []
    for spec in specs:
        for t0 in range(0, spec.n_frames - n_frames + 1, n_frames):
            rows.append(spec.values[:, t0 : t0 + n_frames].T.reshape(-1))
    if not rows:
        raise ValidationError(f"No training spectrogram has {n_frames} frames")
    return np.stack(rows)


def train_music_model(
    layout: SpectrogramLayout,
    specs: list[Spectrogram],
    spec: TrainerSpec,
) -> tuple[dict[str, FactorPayload], list[TrainingReport]]:
    """Shared layouts pool every factor-width window of every clip into one
    payload; per-position layouts train each column from clips cut to the
    layout's length."""
    for s in specs:
        if s.n_bins != layout.n_bins:
            raise LayoutError(f"Training spectrogram has {s.n_bins} bins, layout expects {layout.n_bins}")
    if layout.shared:
        width = min(layout.factor_width, layout.n_frames)
        blocks = [
            np.stack([s.values[:, t0 : t0 + width].T.reshape(-1) for t0 in range(s.n_frames - width + 1)], axis=1)
            for s in specs
            if s.n_frames >= width
        ]
        if not blocks:
            raise ValidationError(f"No training spectrogram has {width} frames")
        (key,) = layout.network.payload_keys()
        payload, report = train_shared(blocks, spec, key)
        return {key: payload}, [report]
    return train_network(layout.network, training_windows(specs, layout.n_frames), spec)


def _observations(layout: SpectrogramLayout, spec: Spectrogram, missing: np.ndarray) -> dict[int, complex]:
    values = layout.to_vector(spec.values)
    skip = np.asarray(missing, dtype=bool).T.reshape(-1)
    return {int(i): complex(values[i]) for i in np.flatnonzero(~skip)}


def _result(
    layout: SpectrogramLayout,
    spec: Spectrogram,
    run: RunResult,
    missing: np.ndarray,
    truth: Spectrogram | None,
    region: np.ndarray | None,
) -> tuple[Spectrogram, Metrics]:
    """Unknown cells keep their evidence; cells without evidence are silent (0)."""
    values = np.where(layout.to_vector(missing), 0.0, layout.to_vector(spec.values))
    out = spec.with_values(layout.to_matrix(run.assignment.filled(values)))
    metrics = Metrics().with_run(run)
    if truth is not None:
        diff = np.abs(out.values - truth.values) ** 2
        cells = diff if region is None else diff[region]
        metrics.mse = float(cells.mean()) if cells.size else 0.0
    return out, metrics


def fill_gap(
    layout: SpectrogramLayout,
    bound: Network,
    spec: Spectrogram,
    gap: tuple[int, int],
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> MusicTaskResult:
    """Reconstruct frames gap[0]..gap[1]-1 from the surrounding evidence.

    MSE is measured over the gap against the input values.
    """
    t0, t1 = gap
    if not 0 <= t0 < t1 <= spec.n_frames:
        raise ValidationError(f"Gap {gap} is not inside {spec.n_frames} frames")
    missing = np.zeros(spec.values.shape, dtype=bool)
    missing[:, t0:t1] = True
    _, run = run_with_evidence(bound, _observations(layout, spec, missing), weight, schedule, workers, trace)
    out, metrics = _result(layout, spec, run, missing, spec, missing)
    return MusicTaskResult(out, run, metrics, [run])


def denoise_two_pass(
    layout: SpectrogramLayout,
    bound: Network,
    noisy: Spectrogram,
    first_weight: float,
    schedule: Schedule,
    clean: Spectrogram | None = None,
    second_weight: float = DENOISE_SECOND_PASS_WEIGHT,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> MusicTaskResult:
    """Run PMP with heavy evidence, then again with light evidence starting
    from the first run's memory-factor votes."""
    everything = np.zeros(noisy.values.shape, dtype=bool)
    obs = _observations(layout, noisy, everything)
    net, first = run_with_evidence(bound, obs, first_weight, schedule, workers, trace)
    memory = set(net.memory_ids)
    carried = {a: v for a, v in first.votes.items() if a in memory}
    log.debug(f"denoise: first pass {first.status.value}, carrying {len(carried)} votes")
    _, second = run_with_evidence(bound, obs, second_weight, schedule, workers, trace, initial_votes=carried)
    out, metrics = _result(layout, noisy, second, everything, clean, None)
    return MusicTaskResult(out, second, metrics, [first, second])
