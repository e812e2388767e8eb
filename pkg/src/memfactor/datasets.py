"""Seeded synthetic datasets: textured faces, stroke digits, tone-grid music.

All generators are deterministic in their seed and need no downloads.
"""

from __future__ import annotations

import numpy as np

from memfactor.validation import ValidationError

# Seven-segment-style strokes on a 28x28 canvas: (row0, col0, row1, col1)
_SEGMENTS = {
    "top": (5, 9, 5, 18),
    "upper_left": (5, 9, 13, 9),
    "upper_right": (5, 18, 13, 18),
    "middle": (13, 9, 13, 18),
    "lower_left": (13, 9, 22, 9),
    "lower_right": (13, 18, 22, 18),
    "bottom": (22, 9, 22, 18),
    "diagonal": (5, 18, 22, 11),
}

_DIGIT_SEGMENTS: dict[int, tuple[str, ...]] = {
    0: ("top", "upper_left", "upper_right", "lower_left", "lower_right", "bottom"),
    1: ("upper_right", "lower_right"),
    2: ("top", "upper_right", "middle", "lower_left", "bottom"),
    3: ("top", "upper_right", "middle", "lower_right", "bottom"),
    4: ("upper_left", "upper_right", "middle", "lower_right"),
    5: ("top", "upper_left", "middle", "lower_right", "bottom"),
    6: ("top", "upper_left", "middle", "lower_left", "lower_right", "bottom"),
    7: ("top", "diagonal"),
    8: ("top", "upper_left", "upper_right", "middle", "lower_left", "lower_right", "bottom"),
    9: ("top", "upper_left", "upper_right", "middle", "lower_right", "bottom"),
}

PENTATONIC_HZ = (261.63, 293.66, 329.63, 392.00, 440.00, 523.25, 587.33, 659.25, 783.99)


def _smooth_field(rng: np.random.Generator, size: int, cells: int = 4) -> np.ndarray:
    coarse = rng.random((cells, cells))
    reps = -(-size // cells)
    return np.kron(coarse, np.ones((reps, reps)))[:size, :size]


def faces(n: int, size: int = 16, seed: int = 0, texture: float = 0.25) -> np.ndarray:
    """n x size x size x 3 float images in [0, 1].

    Each image has a random background, a skin-colored ellipse, two dark eyes
    and a mouth at jittered positions, plus a smooth random texture of
    amplitude `texture` that makes every image distinct.
    """
    if n < 1 or size < 8:
        raise ValidationError(f"faces needs n >= 1 and size >= 8, got n={n}, size={size}")
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    c = (size - 1) / 2.0
    out = np.empty((n, size, size, 3))
    for k in range(n):
        background = rng.uniform(0.0, 0.5, size=3)
        skin = np.array([rng.uniform(0.55, 0.95), rng.uniform(0.35, 0.75), rng.uniform(0.25, 0.6)])
        ry, rx = size * rng.uniform(0.38, 0.46), size * rng.uniform(0.3, 0.4)
        inside = ((yy - c) / ry) ** 2 + ((xx - c) / rx) ** 2 <= 1.0
        img = np.where(inside[..., None], skin, background)

        eye_row = int(round(size * 0.38)) + int(rng.integers(-1, 2))
        gap = int(round(size * 0.18)) + int(rng.integers(0, 2))
        eye = rng.uniform(0.0, 0.2, size=3)
        for col in (int(c) - gap, int(c) + gap):
            img[eye_row : eye_row + 2, col : col + 2] = eye
        mouth_row = int(round(size * 0.7)) + int(rng.integers(-1, 2))
        half = max(1, size // 8)
        img[mouth_row, int(c) - half : int(c) + half + 1] = rng.uniform(0.3, 0.6, size=3) * np.array([1.0, 0.4, 0.4])

        for ch in range(3):
            img[..., ch] += texture * (_smooth_field(rng, size) - 0.5)
        out[k] = np.clip(img, 0.0, 1.0)
    return np.floor(out * 255.0 + 0.5) / 255.0


def _draw_line(canvas: np.ndarray, r0: float, c0: float, r1: float, c1: float, thickness: int, value: int) -> None:
    steps = int(max(abs(r1 - r0), abs(c1 - c0))) * 2 + 1
    for t in np.linspace(0.0, 1.0, steps):
        r = int(round(r0 + t * (r1 - r0)))
        col = int(round(c0 + t * (c1 - c0)))
        lo, hi = -(thickness // 2), thickness - thickness // 2
        canvas[max(r + lo, 0) : r + hi, max(col + lo, 0) : col + hi] = value


def stroke_digits(n: int, seed: int = 0, jitter: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """n 28x28 uint8 digit images built from strokes, and their labels.

    Labels cycle 0..9 so every class is equally represented. Each sample is
    shifted by up to `jitter` pixels and varies stroke thickness and ink.
    """
    if n < 1:
        raise ValidationError(f"stroke_digits needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    images = np.zeros((n, 28, 28), dtype=np.uint8)
    labels = np.arange(n, dtype=np.int64) % 10
    for k in range(n):
        dy, dx = rng.integers(-jitter, jitter + 1, size=2)
        thickness = int(rng.integers(2, 4))
        ink = int(rng.integers(180, 256))
        for name in _DIGIT_SEGMENTS[int(labels[k])]:
            r0, c0, r1, c1 = _SEGMENTS[name]
            _draw_line(images[k], r0 + dy, c0 + dx, r1 + dy, c1 + dx, thickness, ink)
    return images, labels


def tone_grid_music(
    seconds: float = 4.0,
    rate: int = 8000,
    seed: int = 0,
    step_ms: float = 250.0,
    voices: int = 2,
) -> np.ndarray:
    """Mono samples in [-1, 1]: each step plays `voices` pentatonic tones with a decaying envelope."""
    if seconds <= 0 or rate <= 0:
        raise ValidationError(f"music needs positive length and rate, got {seconds}s at {rate} Hz")
    rng = np.random.default_rng(seed)
    n = int(round(seconds * rate))
    step = max(1, int(round(rate * step_ms / 1000.0)))
    t = np.arange(step) / rate
    envelope = np.exp(-t * 6.0)
    out = np.zeros(n)
    for start in range(0, n, step):
        length = min(step, n - start)
        tones = rng.choice(len(PENTATONIC_HZ), size=voices, replace=False)
        chunk = sum(np.sin(2 * np.pi * PENTATONIC_HZ[i] * t[:length]) for i in tones)
        out[start : start + length] = chunk * envelope[:length] / voices
    return 0.9 * out
