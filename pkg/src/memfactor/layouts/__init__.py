"""Network layouts for images, spectrograms and the digit hierarchy."""

from memfactor.layouts.hierarchy import HierarchyLayout, build_mnist_hierarchy, center_digit, pyramid
from memfactor.layouts.image import (
    ImageGrid,
    ImageLayout,
    ImageLayoutSpec,
    build_combined_color_layout,
    build_image_layout,
    image_variables,
    patch_origins,
)
from memfactor.layouts.spectrogram import SpectrogramLayout, build_spectrogram_layout, frame_starts

__all__ = [
    "HierarchyLayout",
    "ImageGrid",
    "ImageLayout",
    "ImageLayoutSpec",
    "SpectrogramLayout",
    "build_combined_color_layout",
    "build_image_layout",
    "build_mnist_hierarchy",
    "build_spectrogram_layout",
    "center_digit",
    "frame_starts",
    "image_variables",
    "patch_origins",
    "pyramid",
]
