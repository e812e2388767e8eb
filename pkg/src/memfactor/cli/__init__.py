"""CLI package for memfactor."""

from memfactor.cli.args import (
    Args,
    BenchmarkArgs,
    ClassifyArgs,
    EvalArgs,
    InferArgs,
    RunFlags,
    SynthArgs,
    Task,
    TrainArgs,
)

__all__ = [
    "Args",
    "BenchmarkArgs",
    "ClassifyArgs",
    "EvalArgs",
    "InferArgs",
    "RunFlags",
    "SynthArgs",
    "Task",
    "TrainArgs",
]
