"""PMP inference engine."""

from memfactor.engine.pmp import OpinionResult, PMPEngine, run
from memfactor.engine.state import RunResult, RunStats, RunStatus, Schedule, ScheduleMode, VoteState
from memfactor.engine.trace import TraceRecorder, TraceRow

__all__ = [
    "OpinionResult",
    "PMPEngine",
    "RunResult",
    "RunStats",
    "RunStatus",
    "Schedule",
    "ScheduleMode",
    "TraceRecorder",
    "TraceRow",
    "VoteState",
    "run",
]
