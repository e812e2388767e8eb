"""Overlapping patch layouts over images.

Variables are indexed channel-major: (channel, row, col) -> c*H*W + r*W + col.
Channels are R, G, B and, for "rgb+gray", a fourth gray channel.

Per-channel layout:
  - 8x8 single-channel factors every 4 pixels ("mono")
  - 4x4 three-channel factors tiling the region ("linked"), which also bind
    the gray channel when present
Combined layout:
  - 8x8 factors every 4 pixels over all channels (192 variables for RGB)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from memfactor.graph.kinds import RealKind
from memfactor.graph.network import Network, NetworkBuilder
from memfactor.io.images import gray_of_rgb
from memfactor.validation import LayoutError

Channels = Literal["mono", "rgb", "rgb+gray"]

CHANNEL_COUNT: dict[str, int] = {"mono": 1, "rgb": 3, "rgb+gray": 4}


def patch_origins(extent: int, patch: int, stride: int) -> list[tuple[int, int]]:
    """(start, size) of each patch along one axis.

    Full patches start every `stride`; if they stop short of the edge, one
    more truncated patch covers the remainder.

    Raises:
        LayoutError: If the extent is smaller than one patch.

    Examples:
        >>> [s for s, _ in patch_origins(16, 8, 4)]
        [0, 4, 8]
        >>> patch_origins(10, 8, 4)
        [(0, 8), (4, 6)]
    """
    if extent < patch:
        raise LayoutError(f"Region extent {extent} is smaller than one {patch}-pixel patch")
    starts = list(range(0, extent - patch + 1, stride))
    spans = [(s, patch) for s in starts]
    last_end = starts[-1] + patch
    if last_end < extent:
        nxt = starts[-1] + stride
        spans.append((nxt, extent - nxt))
    return spans


def tile_origins(extent: int, tile: int) -> list[tuple[int, int]]:
    """Non-overlapping tiles along one axis; the last may be truncated."""
    return [(s, min(tile, extent - s)) for s in range(0, extent, tile)]


@dataclass(frozen=True)
class ImageGrid:
    """Maps (channel, row, col) to variable ids and back."""

    width: int
    height: int
    channels: int

    @property
    def size(self) -> int:
        return self.width * self.height * self.channels

    def var(self, channel: int, row: int, col: int) -> int:
        return channel * self.height * self.width + row * self.width + col

    def coords(self, var: int) -> tuple[int, int, int]:
        channel, rest = divmod(var, self.height * self.width)
        row, col = divmod(rest, self.width)
        return channel, row, col

    def block(self, channels: range | list[int], y: int, x: int, h: int, w: int) -> list[int]:
        """Variable ids of a rectangle, channel-major then row-major."""
        return [self.var(c, r, col) for c in channels for r in range(y, y + h) for col in range(x, x + w)]

    def to_vector(self, image: np.ndarray) -> np.ndarray:
        """H x W x C (or H x W) image -> variable vector."""
        arr = np.asarray(image, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.shape != (self.height, self.width, self.channels):
            raise LayoutError(f"Image shape {arr.shape} does not match grid {(self.height, self.width, self.channels)}")
        return np.transpose(arr, (2, 0, 1)).reshape(-1)

    def to_image(self, vector: np.ndarray) -> np.ndarray:
        arr = np.asarray(vector).reshape(self.channels, self.height, self.width)
        return np.transpose(arr, (1, 2, 0))


@dataclass(frozen=True)
class ImageLayoutSpec:
    width: int
    height: int
    channels: Channels = "rgb"
    patch: int = 8
    stride: int = 4
    linked_patch: int = 4
    roi: tuple[int, int, int, int] | None = None
    """(x0, y0, x1, y1), end-exclusive; None covers the whole image."""
    factor_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.channels not in CHANNEL_COUNT:
            raise LayoutError(f"Unknown channel layout '{self.channels}'")
        if self.patch != 2 * self.linked_patch or self.stride != self.patch // 2:
            raise LayoutError(
                f"Patch geometry must satisfy patch = 2*linked_patch and stride = patch/2, "
                f"got patch={self.patch}, linked_patch={self.linked_patch}, stride={self.stride}"
            )
        x0, y0, x1, y1 = self.region
        if not (0 <= x0 < x1 <= self.width and 0 <= y0 < y1 <= self.height):
            raise LayoutError(f"Region {self.region} is not inside the {self.width}x{self.height} image")

    @property
    def region(self) -> tuple[int, int, int, int]:
        return self.roi if self.roi is not None else (0, 0, self.width, self.height)

    @property
    def grid(self) -> ImageGrid:
        return ImageGrid(self.width, self.height, CHANNEL_COUNT[self.channels])

    def region_mask(self) -> np.ndarray:
        """H x W boolean mask of the region of interest."""
        x0, y0, x1, y1 = self.region
        mask = np.zeros((self.height, self.width), dtype=bool)
        mask[y0:y1, x0:x1] = True
        return mask


@dataclass(frozen=True)
class ImageLayout:
    spec: ImageLayoutSpec
    network: Network
    combined: bool = False

    @property
    def grid(self) -> ImageGrid:
        return self.spec.grid


def _builder(spec: ImageLayoutSpec) -> tuple[NetworkBuilder, ImageGrid]:
    grid = spec.grid
    b = NetworkBuilder()
    b.add_variables(RealKind(nonneg=True, upper=1.0), grid.size)
    return b, grid


def _axes(spec: ImageLayoutSpec, patch: int, stride: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    x0, y0, x1, y1 = spec.region
    ys = [(y0 + s, n) for s, n in patch_origins(y1 - y0, patch, stride)]
    xs = [(x0 + s, n) for s, n in patch_origins(x1 - x0, patch, stride)]
    return ys, xs


def build_image_layout(spec: ImageLayoutSpec) -> ImageLayout:
    """Per-channel mono factors plus linked color factors; no payloads, no evidence.

    Raises:
        LayoutError: If the region is smaller than one patch.
    """
    b, grid = _builder(spec)
    ys, xs = _axes(spec, spec.patch, spec.stride)
    color = 3 if spec.channels != "mono" else 1
    for c in range(color):
        for y, h in ys:
            for x, w in xs:
                b.add_factor(grid.block([c], y, x, h, w), spec.factor_weight, payload_key=f"mono:c{c}:y{y}:x{x}")

    if spec.channels != "mono":
        x0, y0, x1, y1 = spec.region
        linked_channels = list(range(grid.channels))
        for y, h in ((y0 + s, n) for s, n in tile_origins(y1 - y0, spec.linked_patch)):
            for x, w in ((x0 + s, n) for s, n in tile_origins(x1 - x0, spec.linked_patch)):
                b.add_factor(grid.block(linked_channels, y, x, h, w), spec.factor_weight, payload_key=f"linked:y{y}:x{x}")
    return ImageLayout(spec, b.build())


def build_combined_color_layout(spec: ImageLayoutSpec) -> ImageLayout:
    """One factor per 8x8 patch over every channel at once.

    Raises:
        LayoutError: If the region is smaller than one patch.
    """
    b, grid = _builder(spec)
    ys, xs = _axes(spec, spec.patch, spec.stride)
    channels = list(range(grid.channels))
    for y, h in ys:
        for x, w in xs:
            b.add_factor(grid.block(channels, y, x, h, w), spec.factor_weight, payload_key=f"color:y{y}:x{x}")
    return ImageLayout(spec, b.build(), combined=True)


def image_variables(layout: ImageLayout, image: np.ndarray) -> np.ndarray:
    """Full variable vector of an H x W x C float image (adds gray if the layout has it)."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if layout.spec.channels == "rgb+gray" and arr.shape[2] == 3:
        arr = np.concatenate([arr, gray_of_rgb(arr[..., 0], arr[..., 1], arr[..., 2])[..., None]], axis=2)
    return layout.grid.to_vector(arr)
