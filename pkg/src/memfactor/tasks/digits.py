"""Digit classification with the pixel/label hierarchy.

Training fills every hierarchy variable from a labelled image; classification
puts evidence on the level-0 pixels only and reads the top label.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from memfactor.engine import PMPEngine, RunResult, Schedule, TraceRecorder
from memfactor.factors.base import FactorPayload
from memfactor.graph.network import Network
from memfactor.layouts.hierarchy import N_CLASSES, PIXEL_WEIGHT, HierarchyLayout, center_digit
from memfactor.log import log
from memfactor.metrics import Metrics, accuracy
from memfactor.training import TrainerSpec, TrainingReport, train_network
from memfactor.validation import ValidationError

UNKNOWN_LABEL = -1


@dataclass
class Prediction:
    label: int
    """Predicted class, or UNKNOWN_LABEL when the top label stayed Unknown."""
    run: RunResult


def _check_labels(images: np.ndarray, labels: np.ndarray) -> None:
    if len(images) != len(labels):
        raise ValidationError(f"{len(images)} images for {len(labels)} labels")
    bad = [int(v) for v in labels if not 0 <= int(v) < N_CLASSES]
    if bad:
        raise ValidationError(f"Labels must be in [0, {N_CLASSES}), got {bad[:5]}")


def hierarchy_samples(layout: HierarchyLayout, images: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """m x N matrix of fully assigned hierarchies, one per 28x28 training digit."""
    _check_labels(images, labels)
    return np.stack([layout.sample(center_digit(img), int(lab)) for img, lab in zip(images, labels, strict=True)])


def train_hierarchy(
    layout: HierarchyLayout,
    images: np.ndarray,
    labels: np.ndarray,
    spec: TrainerSpec,
) -> tuple[dict[str, FactorPayload], list[TrainingReport]]:
    return train_network(layout.network, hierarchy_samples(layout, images, labels), spec)


def classify_digit(
    layout: HierarchyLayout,
    bound: Network,
    image: np.ndarray,
    schedule: Schedule,
    weight: float = PIXEL_WEIGHT,
    workers: int = 1,
    trace: TraceRecorder | None = None,
) -> Prediction:
    net = layout.with_image(bound, center_digit(image), weight)
    engine = PMPEngine(net, schedule, workers=workers, trace=trace)
    run = engine.run(engine.init())
    value = run.assignment[layout.top_label]
    label = UNKNOWN_LABEL if value is None else int(round(float(np.real(value))))
    return Prediction(label, run)


def classify_batch(
    layout: HierarchyLayout,
    bound: Network,
    images: np.ndarray,
    labels: np.ndarray | None,
    schedule: Schedule,
    weight: float = PIXEL_WEIGHT,
    jobs: int = 1,
    workers: int = 1,
) -> tuple[list[int], Metrics]:
    """Classify every image; accuracy is filled in when labels are given.

    Unknown predictions count as wrong. Iteration and opinion-update counts
    are averaged over images.
    """
    if len(images) == 0:
        raise ValidationError("No images to classify")

    def one(img: np.ndarray) -> Prediction:
        return classify_digit(layout, bound, img, schedule, weight, workers)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs, thread_name_prefix="mfn-digit") as pool:
            predictions = list(pool.map(one, images))
    else:
        predictions = [one(img) for img in images]

    predicted = [p.label for p in predictions]
    n = len(predictions)
    metrics = Metrics(
        iterations=sum(p.run.stats.iterations for p in predictions) / n,
        opinion_updates=sum(p.run.stats.opinion_updates for p in predictions) / n,
        rollbacks=sum(p.run.stats.rollbacks for p in predictions) / n,
    )
    metrics.extra["unknown"] = float(sum(label == UNKNOWN_LABEL for label in predicted))
    metrics.extra["non_converged"] = float(sum(not p.run.converged for p in predictions))
    if labels is not None:
        _check_labels(images, labels)
        metrics.accuracy = accuracy(predicted, [int(v) for v in labels])
        log.info(f"classified {n} digits, accuracy {metrics.accuracy:.3f}")
    return predicted, metrics
