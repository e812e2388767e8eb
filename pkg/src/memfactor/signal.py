"""Spectrogram pipeline: framed Hann-windowed DFT and logarithmic binning.

The forward transform is unnormalized (numpy.fft.rfft): for a frame f
windowed by w, X[k] = sum_t w[t] f[t] exp(-2j pi k t / L), and an L-sample
frame keeps L // 2 + 1 nonnegative frequencies (1001 for 50 ms at 40 kHz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike
from scipy.io import wavfile

from memfactor.log import log
from memfactor.validation import SignalError, WavFormatError

_BISECT_STEPS = 200


@dataclass(frozen=True)
class Spectrogram:
    """Binned complex spectrogram: rows are bins, columns are frames."""

    values: np.ndarray
    sample_rate: int
    frame_ms: float
    hop_ms: float
    boundaries: tuple[int, ...]
    """Bin j holds frequencies boundaries[j] .. boundaries[j + 1] - 1."""

    @property
    def n_bins(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_frames(self) -> int:
        return int(self.values.shape[1])

    @property
    def n_frequencies(self) -> int:
        return self.boundaries[-1]

    def with_values(self, values: np.ndarray) -> Spectrogram:
        arr = np.asarray(values, dtype=np.complex128)
        if arr.shape != self.values.shape:
            raise SignalError(f"Replacement values have shape {arr.shape}, expected {self.values.shape}")
        return Spectrogram(arr, self.sample_rate, self.frame_ms, self.hop_ms, self.boundaries)

    def metadata(self) -> tuple[int, float, float, tuple[int, ...]]:
        return self.sample_rate, self.frame_ms, self.hop_ms, self.boundaries


def frame_length(rate: int, ms: float) -> int:
    return int(round(rate * ms / 1000.0))


def stft(samples: ArrayLike, rate: int, frame_ms: float = 50.0, hop_ms: float = 25.0) -> np.ndarray:
    """Full-resolution STFT: (L // 2 + 1) x n_frames complex matrix.

    Raises:
        SignalError: If the rate is not positive, a frame is shorter than 2
            samples, or the input is shorter than one frame.
    """
    if rate <= 0:
        raise SignalError(f"Sample rate must be positive, got {rate}")
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise SignalError(f"STFT needs a 1-D signal, got shape {x.shape}")
    L = frame_length(rate, frame_ms)
    hop = frame_length(rate, hop_ms)
    if L < 2 or hop < 1:
        raise SignalError(f"Frame of {frame_ms} ms / hop of {hop_ms} ms at {rate} Hz is too short")
    if x.size < L:
        raise SignalError(f"Signal has {x.size} samples, fewer than one {L}-sample frame")

    frames = sliding_window_view(x, L)[::hop]
    spectrum = np.fft.rfft(frames * np.hanning(L), axis=1)
    log.debug(f"stft: {frames.shape[0]} frames of {L} samples, {spectrum.shape[1]} frequencies")
    return np.ascontiguousarray(spectrum.T)


def _bin_sizes(n_frequencies: int, n_bins: int, a: float) -> np.ndarray:
    # exponents capped so sizes stay finite; any capped bin already exceeds n_f
    j = np.arange(1, n_bins + 1, dtype=np.float64)
    exponents = np.minimum(j * a, math.log(n_frequencies + 1.0))
    return np.floor(np.exp(exponents)).astype(np.int64)


def log_bin_sizes(n_frequencies: int, n_bins: int) -> np.ndarray:
    """Sizes floor(e^{j a}), j = 1..n_bins, for the largest a whose total fits.

    Leftover frequencies are appended to the last bin, so the sizes sum to
    `n_frequencies` and never decrease.

    Raises:
        SignalError: If n_bins is not in [1, n_frequencies].
    """
    if not 1 <= n_bins <= n_frequencies:
        raise SignalError(f"Need 1 <= n_bins <= n_frequencies, got {n_bins} bins for {n_frequencies}")
    lo, hi = 0.0, math.log(n_frequencies + 1.0) + 1.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if int(_bin_sizes(n_frequencies, n_bins, mid).sum()) <= n_frequencies:
            lo = mid
        else:
            hi = mid
    sizes = _bin_sizes(n_frequencies, n_bins, lo)
    sizes[-1] += n_frequencies - int(sizes.sum())
    return sizes


def log_bin(
    matrix: ArrayLike,
    n_bins: int = 400,
    sample_rate: int = 0,
    frame_ms: float = 50.0,
    hop_ms: float = 25.0,
) -> Spectrogram:
    """Sum each bin's member frequencies (ascending) into one complex value."""
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.ndim != 2:
        raise SignalError(f"log_bin needs a frequencies x frames matrix, got shape {arr.shape}")
    sizes = log_bin_sizes(arr.shape[0], n_bins)
    boundaries = np.concatenate([[0], np.cumsum(sizes)])
    binned = np.add.reduceat(arr, boundaries[:-1], axis=0)
    return Spectrogram(binned, sample_rate, frame_ms, hop_ms, tuple(int(b) for b in boundaries))


def spectrogram_of(
    samples: ArrayLike, rate: int, n_bins: int = 400, frame_ms: float = 50.0, hop_ms: float = 25.0
) -> Spectrogram:
    return log_bin(stft(samples, rate, frame_ms, hop_ms), n_bins, rate, frame_ms, hop_ms)


def unbin_magnitude_mse(a: Spectrogram, b: Spectrogram) -> float:
    """Mean over bins x frames of |a - b|^2.

    Raises:
        SignalError: If shapes or metadata differ.
    """
    if a.values.shape != b.values.shape:
        raise SignalError(f"Spectrogram shapes differ: {a.values.shape} vs {b.values.shape}")
    if a.metadata() != b.metadata():
        raise SignalError("Spectrogram metadata differ (rate, frame, hop or bin boundaries)")
    return float(np.mean(np.abs(a.values - b.values) ** 2))


def read_wav(path: Path | str) -> tuple[int, np.ndarray]:
    """Read 16-bit PCM mono audio as floats in [-1, 1).

    Raises:
        WavFormatError: If the file is not a readable 16-bit mono WAV.
    """
    path = Path(path)
    try:
        rate, data = wavfile.read(path)
    except ValueError as e:
        raise WavFormatError(f"{path}: {e}") from e
    if data.ndim != 1:
        raise WavFormatError(f"{path}: {data.shape[1]} channels, only mono is supported")
    if data.dtype != np.int16:
        raise WavFormatError(f"{path}: sample type {data.dtype}, only 16-bit PCM is supported")
    return int(rate), data.astype(np.float64) / 32768.0


def write_wav(path: Path | str, rate: int, samples: ArrayLike) -> Path:
    """Write floats in [-1, 1] as 16-bit PCM mono."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 32767 / 32768)
    wavfile.write(path, rate, np.round(x * 32768.0).astype(np.int16))
    return path
