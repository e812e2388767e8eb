"""Tests for the spectrogram pipeline and WAV I/O."""

from pathlib import Path

import numpy as np
import pytest

from memfactor.signal import (
    frame_length,
    log_bin,
    log_bin_sizes,
    read_wav,
    spectrogram_of,
    stft,
    unbin_magnitude_mse,
    write_wav,
)
from memfactor.validation import SignalError, WavFormatError


class TestSTFT:
    """Tests for stft()."""

    def test_frequency_count(self) -> None:
        assert frame_length(40000, 50.0) == 2000
        spectrum = stft(np.zeros(4000), 40000)
        assert spectrum.shape == (1001, 3)

    def test_tone_peak(self) -> None:
        rate = 40000
        t = np.arange(rate // 10) / rate
        spectrum = stft(np.sin(2 * np.pi * 1000.0 * t), rate)
        # bin k sits at k * rate / L Hz
        assert int(np.argmax(np.abs(spectrum[:, 0]))) == 50

    @pytest.mark.parametrize(
        "samples,rate,match",
        [
            (np.zeros(10), 40000, "fewer than one"),
            (np.zeros(4000), 0, "positive"),
            (np.zeros((2, 4000)), 40000, "1-D"),
        ],
        ids=["short", "rate", "shape"],
    )
    def test_errors(self, samples: np.ndarray, rate: int, match: str) -> None:
        with pytest.raises(SignalError, match=match):
            stft(samples, rate)


class TestLogBinning:
    """Tests for log_bin_sizes() and log_bin()."""

    def test_sizes_cover_all_frequencies(self) -> None:
        sizes = log_bin_sizes(1001, 400)
        assert len(sizes) == 400
        assert int(sizes.sum()) == 1001
        assert np.all(np.diff(sizes) >= 0)
        assert sizes[0] >= 1

    @pytest.mark.parametrize("n_bins", [1, 10, 100, 1001], ids=["one", "ten", "hundred", "all"])
    def test_sizes_various(self, n_bins: int) -> None:
        sizes = log_bin_sizes(1001, n_bins)
        assert int(sizes.sum()) == 1001
        assert np.all(np.diff(sizes) >= 0)

    def test_too_many_bins(self) -> None:
        with pytest.raises(SignalError):
            log_bin_sizes(10, 11)

    def test_bins_sum_members(self, rng: np.random.Generator) -> None:
        matrix = rng.normal(size=(50, 4)) + 1j * rng.normal(size=(50, 4))
        spec = log_bin(matrix, n_bins=8)
        assert spec.values.shape == (8, 4)
        b = spec.boundaries
        for j in range(8):
            np.testing.assert_allclose(spec.values[j], matrix[b[j] : b[j + 1]].sum(axis=0))

    def test_spectrogram_of(self) -> None:
        spec = spectrogram_of(np.zeros(4000), 40000, n_bins=400)
        assert (spec.n_bins, spec.n_frames, spec.n_frequencies) == (400, 3, 1001)


class TestMagnitudeMSE:
    def test_mse(self) -> None:
        spec = log_bin(np.ones((20, 3)), n_bins=4)
        other = spec.with_values(spec.values + 1j)
        assert unbin_magnitude_mse(spec, other) == pytest.approx(1.0)

    def test_metadata_mismatch(self) -> None:
        a = log_bin(np.ones((20, 3)), n_bins=4, sample_rate=16000)
        b = log_bin(np.ones((20, 3)), n_bins=4, sample_rate=8000)
        with pytest.raises(SignalError, match="metadata"):
            unbin_magnitude_mse(a, b)

    def test_shape_mismatch(self) -> None:
        a = log_bin(np.ones((20, 3)), n_bins=4)
        with pytest.raises(SignalError):
            a.with_values(np.zeros((4, 2)))


class TestWav:
    def test_round_trip(self, tmp_path: Path, rng: np.random.Generator) -> None:
        samples = rng.uniform(-0.9, 0.9, 800)
        path = write_wav(tmp_path / "clip.wav", 16000, samples)
        rate, back = read_wav(path)
        assert rate == 16000
        np.testing.assert_allclose(back, samples, atol=1 / 32768)

    def test_not_a_wav(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.wav"
        path.write_bytes(b"not a wav file at all")
        with pytest.raises(WavFormatError):
            read_wav(path)
