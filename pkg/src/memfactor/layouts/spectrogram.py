"""Column layouts over spectrograms.

Variable (bin b, frame t) has id t * n_bins + b. Each factor spans every
bin over `factor_width` consecutive frames, with stride max(width // 2, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from memfactor.graph.kinds import ComplexKind
from memfactor.graph.network import Network, NetworkBuilder
from memfactor.validation import LayoutError


@dataclass(frozen=True)
class SpectrogramLayout:
    n_bins: int
    n_frames: int
    factor_width: int
    shared: bool
    network: Network
    starts: tuple[int, ...]
    """First frame of each factor, in factor-id order."""

    def var(self, b: int, t: int) -> int:
        return t * self.n_bins + b

    def to_vector(self, spec: np.ndarray) -> np.ndarray:
        """n_bins x n_frames matrix -> variable vector."""
        arr = np.asarray(spec)
        if arr.shape != (self.n_bins, self.n_frames):
            raise LayoutError(f"Spectrogram shape {arr.shape} does not match layout {(self.n_bins, self.n_frames)}")
        return arr.T.reshape(-1)

    def to_matrix(self, vector: np.ndarray) -> np.ndarray:
        return np.asarray(vector).reshape(self.n_frames, self.n_bins).T


def frame_starts(n_frames: int, width: int) -> list[int]:
    """Start frames; the last factor is aligned to the right edge at full width."""
    stride = max(width // 2, 1)
    starts = list(range(0, n_frames - width + 1, stride))
    if starts[-1] + width < n_frames:
        starts.append(n_frames - width)
    return starts


def build_spectrogram_layout(
    n_bins: int, n_frames: int, factor_width: int, shared: bool = True, factor_weight: float = 1.0
) -> SpectrogramLayout:
    """Factors covering the whole frequency range over a few frames.

    With `shared`, every factor carries the key `shared:w<width>` so one
    payload trained on all positions serves them all; otherwise each factor
    gets its own `col:<start>` key. If there are fewer frames than
    `factor_width`, a single truncated factor covers them.

    Raises:
        LayoutError: If any size is < 1.
    """
    if n_bins < 1 or n_frames < 1 or factor_width < 1:
        raise LayoutError(f"Spectrogram layout needs positive sizes, got {n_bins}x{n_frames}, width {factor_width}")

    width = min(factor_width, n_frames)
    # last factor is right-aligned at full width, not truncated; all factors share one width
    starts = frame_starts(n_frames, width)
    b = NetworkBuilder()
    b.add_variables(ComplexKind(), n_bins * n_frames)
    for t0 in starts:
        neighbors = [t * n_bins + k for t in range(t0, t0 + width) for k in range(n_bins)]
        key = f"shared:w{width}" if shared else f"col:{t0}"
        b.add_factor(neighbors, factor_weight, payload_key=key)
    return SpectrogramLayout(n_bins, n_frames, factor_width, shared, b.build(), tuple(starts))
