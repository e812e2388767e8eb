"""File formats: PPM/PGM images, CSV grids, model payloads, spectrograms, network documents."""

from memfactor.io.csvio import read_csv_matrix, read_labels, write_csv_matrix, write_csv_rows, write_labels
from memfactor.io.images import ImageBuffer, gray_of_rgb, match_gray, read_image, write_image
from memfactor.io.models import ModelManifest, load_model, load_payload, save_model, save_payload
from memfactor.io.network_json import NetworkDocument, load_network, save_network
from memfactor.io.spectrogram import load_spectrogram, save_spectrogram, write_magnitude_csv

__all__ = [
    "ImageBuffer",
    "ModelManifest",
    "NetworkDocument",
    "gray_of_rgb",
    "load_model",
    "load_network",
    "load_payload",
    "load_spectrogram",
    "match_gray",
    "read_csv_matrix",
    "read_image",
    "read_labels",
    "save_model",
    "save_network",
    "save_payload",
    "save_spectrogram",
    "write_csv_matrix",
    "write_csv_rows",
    "write_image",
    "write_labels",
    "write_magnitude_csv",
]
