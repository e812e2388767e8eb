"""End-to-end reconstruction and classification tasks."""

from memfactor.tasks.common import (
    DEFAULT_EVIDENCE_WEIGHT,
    DENOISE_SECOND_PASS_WEIGHT,
    build_schedule,
    evidence_weight,
    run_with_evidence,
    subspace_config,
    trainer_spec,
)
from memfactor.tasks.digits import Prediction, classify_batch, classify_digit, train_hierarchy
from memfactor.tasks.images import (
    ImageTaskResult,
    add_noise,
    benchmark_restore,
    colorize,
    denoise,
    drop_mask,
    erase_blob,
    inpaint,
    mean_fill,
    rect_mask,
    train_image_model,
)
from memfactor.tasks.music import MusicTaskResult, add_audio_noise, denoise_two_pass, fill_gap, train_music_model

__all__ = [
    "DEFAULT_EVIDENCE_WEIGHT",
    "DENOISE_SECOND_PASS_WEIGHT",
    "ImageTaskResult",
    "MusicTaskResult",
    "Prediction",
    "add_audio_noise",
    "add_noise",
    "benchmark_restore",
    "build_schedule",
    "classify_batch",
    "classify_digit",
    "colorize",
    "denoise",
    "denoise_two_pass",
    "drop_mask",
    "erase_blob",
    "evidence_weight",
    "fill_gap",
    "inpaint",
    "mean_fill",
    "rect_mask",
    "run_with_evidence",
    "subspace_config",
    "train_hierarchy",
    "train_image_model",
    "train_music_model",
    "trainer_spec",
]
