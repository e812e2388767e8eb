"""Glue between run-config models and the library types."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from memfactor.config import FactorSettings, RunConfig, ScheduleSettings
from memfactor.engine import PMPEngine, RunResult, Schedule, ScheduleMode, TraceRecorder
from memfactor.factors.subspace import ConfidencePenalty, SubspaceConfig
from memfactor.graph.network import Network, attach_evidence
from memfactor.training import TrainerSpec

# Evidence weights used when the run-config leaves weights.evidence unset
DEFAULT_EVIDENCE_WEIGHT: dict[str, float] = {
    "inpaint": 20.0,
    "drop": 2.0,
    "noise": 1.0,
    "colorize": 100.0,
    "restore": 0.01,
    "music_gap": 1.0,
    "music_denoise": 100.0,
    "classify": 1.0,
}

DENOISE_SECOND_PASS_WEIGHT = 0.01


def evidence_weight(config: RunConfig) -> float:
    if config.weights.evidence is not None:
        return config.weights.evidence
    return DEFAULT_EVIDENCE_WEIGHT[config.task]


def build_schedule(settings: ScheduleSettings, track_cost: bool = False) -> Schedule:
    mode = ScheduleMode.SERIAL if settings.mode == "serial" else ScheduleMode.SIMULTANEOUS
    return Schedule(
        mode=mode,
        fraction=settings.fraction,
        rollback=settings.rollback,
        max_iterations=settings.max_iterations,
        seed=settings.seed,
        track_cost=track_cost,
    )


def subspace_config(settings: FactorSettings) -> SubspaceConfig:
    return SubspaceConfig(
        lam=settings.lam,
        alpha=settings.alpha,
        qp_max_iters=settings.qp_max_iters,
        qp_tolerance=settings.qp_tolerance,
        penalty=ConfidencePenalty(settings.confidence_penalty),
    )


def trainer_spec(config: RunConfig) -> TrainerSpec:
    f = config.factor
    return TrainerSpec(
        trainer=config.trainer,
        hidden_p=f.hidden_p,
        subsample_prob=f.subsample_prob,
        nmf_max_iters=f.nmf_max_iters,
        nmf_tol=f.nmf_tol,
        nmf_restarts=f.nmf_restarts,
        seed=config.seed,
        subspace=subspace_config(f),
    )


def run_with_evidence(
    bound: Network,
    observations: Mapping[int, float | complex],
    weight: float,
    schedule: Schedule,
    workers: int = 1,
    trace: TraceRecorder | None = None,
    initial_votes: Mapping[int, np.ndarray] | None = None,
) -> tuple[Network, RunResult]:
    """Attach evidence to a bound network and run PMP on it."""
    net = attach_evidence(bound, observations, weight)
    engine = PMPEngine(net, schedule, workers=workers, trace=trace)
    return net, engine.run(engine.init(initial_votes=initial_votes))
