"""Spectrogram files: versioned little-endian binary and magnitude CSV."""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from memfactor.io.csvio import write_csv_matrix
from memfactor.signal import Spectrogram
from memfactor.validation import ChecksumError, ModelFormatError

SPECTROGRAM_MAGIC = b"MFNS"
FORMAT_VERSION = 1

# magic, version, sample_rate, frame_ms, hop_ms, n_bins, n_frames
_HEADER = struct.Struct("<4sHIddII")
_CRC = struct.Struct("<I")


def encode_spectrogram(spec: Spectrogram) -> bytes:
    body = _HEADER.pack(
        SPECTROGRAM_MAGIC, FORMAT_VERSION, spec.sample_rate, spec.frame_ms, spec.hop_ms, spec.n_bins, spec.n_frames
    )
    body += np.asarray(spec.boundaries, dtype="<u4").tobytes()
    body += np.ascontiguousarray(spec.values, dtype="<c16").tobytes()
    return body + _CRC.pack(zlib.crc32(body))


def decode_spectrogram(raw: bytes, source: str = "<bytes>") -> Spectrogram:
    """Raises ModelFormatError on bad magic/version/size, ChecksumError on CRC mismatch."""
    if len(raw) < _HEADER.size + _CRC.size:
        raise ModelFormatError(f"{source}: file too short for a spectrogram header")
    magic, version, rate, frame_ms, hop_ms, n_bins, n_frames = _HEADER.unpack_from(raw)
    if magic != SPECTROGRAM_MAGIC:
        raise ModelFormatError(f"{source}: unknown magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{source}: format version {version}, expected {FORMAT_VERSION}")
    b_end = _HEADER.size + 4 * (n_bins + 1)
    end = b_end + 16 * n_bins * n_frames
    if len(raw) != end + _CRC.size:
        raise ModelFormatError(f"{source}: {len(raw)} bytes, header promises {end + _CRC.size}")
    (stored,) = _CRC.unpack_from(raw, end)
    if zlib.crc32(raw[:end]) != stored:
        raise ChecksumError(f"{source}: checksum mismatch")
    boundaries = np.frombuffer(raw, dtype="<u4", count=n_bins + 1, offset=_HEADER.size)
    values = np.frombuffer(raw, dtype="<c16", count=n_bins * n_frames, offset=b_end).reshape(n_bins, n_frames)
    return Spectrogram(values.astype(np.complex128), rate, frame_ms, hop_ms, tuple(int(b) for b in boundaries))


def save_spectrogram(path: Path | str, spec: Spectrogram) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_spectrogram(spec))
    return path


def load_spectrogram(path: Path | str) -> Spectrogram:
    path = Path(path)
    return decode_spectrogram(path.read_bytes(), str(path))


def write_magnitude_csv(path: Path | str, spec: Spectrogram) -> Path:
    """|values| as a bins x frames grid, for plotting."""
    return write_csv_matrix(path, np.abs(spec.values))
