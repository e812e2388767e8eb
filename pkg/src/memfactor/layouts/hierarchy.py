"""Pixel/label hierarchy for digit classification.

Level n (0..3) has a pixel grid of side 32 / 2**n and a label grid of side
(32 / 2**n - 4) / 2 + 1, i.e. one label per 4x4 subregion at stride 2
(15, 7, 3, 1). Level-(n+1) pixels are 2x2 averages of level-n pixels.

A level-n factor at factor grid position (p, q) covers the 8x8 level-n
pixel patch starting at (4p, 4q) and binds:
  - those 64 level-n pixels
  - the 3x3 level-n labels whose subregions lie in the patch (rows 2p..2p+2)
  - the 4x4 level-(n+1) pixels starting at (2p, 2q)
  - the level-(n+1) label (p, q)
Levels 0, 1, 2 carry 7x7, 3x3 and 1x1 factors: 59 factors of 90 variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from memfactor.graph.kinds import IntegerKind, LabelKind
from memfactor.graph.network import Network, NetworkBuilder, attach_evidence
from memfactor.validation import LayoutError

BASE = 32
LEVELS = 4
N_CLASSES = 10
PIXEL_WEIGHT = 1.0
LABEL_WEIGHT = 32.0
DIGIT_SIDE = 28


def pixel_side(level: int) -> int:
    return BASE >> level


def label_side(level: int) -> int:
    return (pixel_side(level) - 4) // 2 + 1


def factor_side(level: int) -> int:
    return (pixel_side(level) - 8) // 4 + 1


@dataclass(frozen=True)
class HierarchyLayout:
    network: Network
    pixel_offsets: tuple[int, ...]
    label_offsets: tuple[int, ...]
    factor_positions: tuple[tuple[int, int, int], ...]
    """(level, p, q) of each factor, in factor-id order."""

    def pixel(self, level: int, row: int, col: int) -> int:
        return self.pixel_offsets[level] + row * pixel_side(level) + col

    def label(self, level: int, row: int, col: int) -> int:
        return self.label_offsets[level] + row * label_side(level) + col

    @property
    def top_label(self) -> int:
        return self.label(LEVELS - 1, 0, 0)

    @property
    def base_pixels(self) -> list[int]:
        side = pixel_side(0)
        return list(range(self.pixel_offsets[0], self.pixel_offsets[0] + side * side))

    def factor_neighbors(self, level: int, p: int, q: int) -> list[int]:
        """Regenerate a factor's neighbor list from its grid position."""
        y, x = 4 * p, 4 * q
        pixels = [self.pixel(level, r, c) for r in range(y, y + 8) for c in range(x, x + 8)]
        labels = [self.label(level, r, c) for r in range(2 * p, 2 * p + 3) for c in range(2 * q, 2 * q + 3)]
        upper = [self.pixel(level + 1, r, c) for r in range(2 * p, 2 * p + 4) for c in range(2 * q, 2 * q + 4)]
        return pixels + labels + upper + [self.label(level + 1, p, q)]

    def factor_weights(self) -> list[float]:
        return [PIXEL_WEIGHT] * 64 + [LABEL_WEIGHT] * 9 + [PIXEL_WEIGHT] * 16 + [LABEL_WEIGHT]

    def sample(self, image: np.ndarray, label: int) -> np.ndarray:
        """Training fill-in: full variable vector for a 32x32 image of class `label`.

        Hidden pixels are the rounded mean of the 2x2 patch below; every
        label variable takes the true class.
        """
        values = np.zeros(self.network.n_variables, dtype=np.float64)
        for level, grid in enumerate(pyramid(image)):
            side = pixel_side(level)
            start = self.pixel_offsets[level]
            values[start : start + side * side] = grid.reshape(-1)
        for level in range(LEVELS):
            side = label_side(level)
            start = self.label_offsets[level]
            values[start : start + side * side] = label
        return values

    def observations(self, image: np.ndarray) -> dict[int, float]:
        """Level-0 pixel evidence for a 32x32 image."""
        grid = np.asarray(image)
        if grid.shape != (BASE, BASE):
            raise LayoutError(f"Hierarchy evidence must be {BASE}x{BASE}, got {grid.shape}")
        flat = grid.reshape(-1)
        return {v: float(flat[k]) for k, v in enumerate(self.base_pixels)}

    def with_image(self, network: Network, image: np.ndarray, weight: float = PIXEL_WEIGHT) -> Network:
        """`network` (usually the bound hierarchy) plus one evidence factor per level-0 pixel."""
        return attach_evidence(network, self.observations(image), weight)


def pyramid(image: np.ndarray) -> list[np.ndarray]:
    """Pixel grids of all levels; each level is floor(mean of 2x2 + 0.5) of the one below."""
    grid = np.asarray(image, dtype=np.int64)
    if grid.shape != (BASE, BASE):
        raise LayoutError(f"Hierarchy images must be {BASE}x{BASE}, got {grid.shape}")
    levels = [grid]
    for _ in range(1, LEVELS):
        side = grid.shape[0] // 2
        sums = grid.reshape(side, 2, side, 2).sum(axis=(1, 3))
        grid = (sums + 2) // 4
        levels.append(grid)
    return levels


def center_digit(image: np.ndarray) -> np.ndarray:
    """Pad a 28x28 digit by 2 pixels on every side."""
    arr = np.asarray(image)
    if arr.shape != (DIGIT_SIDE, DIGIT_SIDE):
        raise LayoutError(f"Digits must be {DIGIT_SIDE}x{DIGIT_SIDE}, got {arr.shape}")
    pad = (BASE - DIGIT_SIDE) // 2
    return np.pad(arr, pad, mode="constant", constant_values=0)


def build_mnist_hierarchy() -> HierarchyLayout:
    """Four-level pixel/label hierarchy; memory factors share no payloads."""
    b = NetworkBuilder()
    pixel_offsets, label_offsets = [], []
    for level in range(LEVELS):
        pixel_offsets.append(b.add_variables(IntegerKind(0, 255), pixel_side(level) ** 2)[0])
    for level in range(LEVELS):
        label_offsets.append(b.add_variables(LabelKind(N_CLASSES), label_side(level) ** 2)[0])

    partial = HierarchyLayout(Network([], []), tuple(pixel_offsets), tuple(label_offsets), ())
    weights = partial.factor_weights()
    positions = []
    for level in range(LEVELS - 1):
        side = factor_side(level)
        for p in range(side):
            for q in range(side):
                b.add_factor(partial.factor_neighbors(level, p, q), weights, payload_key=f"h{level}:p{p}:q{q}")
                positions.append((level, p, q))
    return HierarchyLayout(b.build(), tuple(pixel_offsets), tuple(label_offsets), tuple(positions))
