"""PPM/PGM images (P2, P3, P5, P6; maxval 255) and color helpers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from memfactor.validation import ImageHeaderError, ImageMaxvalError, ImageTruncatedError, ValidationError

GRAY_COEFFS = (0.212673, 0.715152, 0.072175)

_MAGIC_CHANNELS = {b"P2": 1, b"P3": 3, b"P5": 1, b"P6": 3}
_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


@dataclass(frozen=True)
class ImageBuffer:
    """H x W x C bytes; C is 1 (gray), 3 (RGB) or 4 (RGB + derived gray)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.dtype != np.uint8 or self.data.ndim != 3 or self.data.shape[2] not in (1, 3, 4):
            raise ValidationError(f"ImageBuffer needs uint8 H x W x {{1,3,4}}, got {self.data.dtype} {self.data.shape}")

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    def floats(self) -> np.ndarray:
        """Float view in [0, 1]: byte / 255."""
        return self.data.astype(np.float64) / 255.0

    @classmethod
    def from_floats(cls, values: np.ndarray) -> ImageBuffer:
        """Clamp to [0, 1], scale by 255 and round half up."""
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        return cls(to_bytes(arr))

    def rgb(self) -> ImageBuffer:
        if self.channels < 3:
            raise ValidationError("Image has no color channels")
        return ImageBuffer(np.ascontiguousarray(self.data[:, :, :3]))

    def gray(self) -> ImageBuffer:
        """Gray channel: the stored fourth channel, or derived from RGB."""
        if self.channels == 1:
            return self
        if self.channels == 4:
            return ImageBuffer(np.ascontiguousarray(self.data[:, :, 3:]))
        f = self.floats()
        return ImageBuffer.from_floats(gray_of_rgb(f[..., 0], f[..., 1], f[..., 2]))


def to_bytes(values: np.ndarray) -> np.ndarray:
    """Floats in [0, 1] to uint8 with clamping and half-up rounding."""
    clipped = np.clip(np.nan_to_num(np.asarray(values, dtype=np.float64), nan=0.0), 0.0, 1.0)
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def gray_of_rgb(r: np.ndarray | float, g: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
    kr, kg, kb = GRAY_COEFFS
    return kr * np.asarray(r, dtype=np.float64) + kg * np.asarray(g, dtype=np.float64) + kb * np.asarray(b, dtype=np.float64)


def match_gray(rgb: np.ndarray, target_gray: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Scale each pixel's (r, g, b) so its gray value equals `target_gray`.

    Pixels whose own gray value is below `eps` become `target_gray` on every
    channel. Output is not clamped.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    target = np.asarray(target_gray, dtype=np.float64)
    current = gray_of_rgb(rgb[..., 0], rgb[..., 1], rgb[..., 2])
    dark = current < eps
    scale = target / np.where(dark, 1.0, current)
    return np.where(dark[..., None], target[..., None], rgb * scale[..., None])


# --- Reading ---


def _header(raw: bytes, path: Path) -> tuple[bytes, int, int, int, int]:
    """Parse magic, width, height, maxval; return them and the payload offset."""
    tokens: list[bytes] = []
    pos = 0
    for _ in range(4):
        m = _TOKEN.match(raw, pos)
        if m is None:
            raise ImageHeaderError(f"{path}: incomplete header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    if magic not in _MAGIC_CHANNELS:
        raise ImageHeaderError(f"{path}: unsupported magic {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise ImageHeaderError(f"{path}: non-numeric header field") from e
    if width <= 0 or height <= 0:
        raise ImageHeaderError(f"{path}: invalid size {width}x{height}")
    if maxval != 255:
        raise ImageMaxvalError(f"{path}: maxval {maxval} (only 255 is supported)")
    return magic, width, height, maxval, pos + 1


def decode_image(raw: bytes, path: Path | str = "<bytes>") -> ImageBuffer:
    """Decode PPM/PGM bytes.

    Raises:
        ImageHeaderError: Malformed header or non-numeric ASCII samples.
        ImageMaxvalError: maxval other than 255.
        ImageTruncatedError: Fewer samples than width * height * channels.
    """
    path = Path(path)
    magic, width, height, _, offset = _header(raw, path)
    channels = _MAGIC_CHANNELS[magic]
    count = width * height * channels
    if magic in (b"P5", b"P6"):
        payload = raw[offset : offset + count]
        if len(payload) < count:
            raise ImageTruncatedError(f"{path}: {len(payload)} of {count} bytes present")
        samples = np.frombuffer(payload, dtype=np.uint8)
    else:
        try:
            values = [int(t) for t in raw[offset:].split()]
        except ValueError as e:
            raise ImageHeaderError(f"{path}: non-numeric sample in ASCII payload") from e
        if len(values) < count:
            raise ImageTruncatedError(f"{path}: {len(values)} of {count} samples present")
        arr = np.array(values[:count], dtype=np.int64)
        if arr.min() < 0 or arr.max() > 255:
            raise ImageHeaderError(f"{path}: sample outside [0, 255]")
        samples = arr.astype(np.uint8)
    return ImageBuffer(samples.reshape(height, width, channels).copy())


def read_image(path: Path | str) -> ImageBuffer:
    path = Path(path)
    return decode_image(path.read_bytes(), path)


# --- Writing ---


def encode_image(image: ImageBuffer, fmt: Literal["binary", "ascii"] = "binary") -> bytes:
    """Encode as P5/P6 (binary) or P2/P3 (ascii).

    Raises:
        ValidationError: For 4-channel buffers; split them with rgb() / gray().
    """
    if image.channels == 4:
        raise ValidationError("Cannot write a 4-channel image; write image.rgb() and image.gray() separately")
    color = image.channels == 3
    if fmt == "binary":
        magic = b"P6" if color else b"P5"
        return magic + f"\n{image.width} {image.height}\n255\n".encode() + image.data.tobytes()
    magic = "P3" if color else "P2"
    rows = [" ".join(str(int(v)) for v in row.reshape(-1)) for row in image.data]
    return (f"{magic}\n{image.width} {image.height}\n255\n" + "\n".join(rows) + "\n").encode()


def write_image(path: Path | str, image: ImageBuffer, fmt: Literal["binary", "ascii"] = "binary") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_image(image, fmt))
    return path


def image_extension(image: ImageBuffer) -> str:
    return ".ppm" if image.channels >= 3 else ".pgm"
