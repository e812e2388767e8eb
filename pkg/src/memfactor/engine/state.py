"""PMP state, schedule and result types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from memfactor.graph.costs import Assignment, CostTuple
from memfactor.validation import NonConvergedError, validate_fraction


class ScheduleMode(Enum):
    SERIAL = "serial"
    SIMULTANEOUS = "simultaneous"


@dataclass(frozen=True)
class Schedule:
    """How many dissatisfied factors vote per iteration, and the safety nets.

    `max_iterations=None` means 10 times the number of factors.
    `track_reacting=False` recomputes every factor next to a vote each
    iteration instead of only the reacting set.
    """

    mode: ScheduleMode = ScheduleMode.SERIAL
    fraction: float = 0.1
    rollback: bool = True
    max_iterations: int | None = None
    seed: int = 0
    track_reacting: bool = True
    track_cost: bool = False
    """Evaluate the cost tuple every iteration (always on for rollback or tracing)."""

    def __post_init__(self) -> None:
        validate_fraction("schedule fraction", self.fraction)

    @classmethod
    def serial(cls, **kwargs: object) -> Schedule:
        return cls(mode=ScheduleMode.SERIAL, **kwargs)  # type: ignore[arg-type]

    @classmethod
    def simultaneous(cls, fraction: float = 0.1, **kwargs: object) -> Schedule:
        return cls(mode=ScheduleMode.SIMULTANEOUS, fraction=fraction, **kwargs)  # type: ignore[arg-type]

    def select_count(self, n_dissatisfied: int) -> int:
        """Number of factors allowed to vote this iteration."""
        if self.mode is ScheduleMode.SERIAL:
            return 1
        return max(1, math.ceil(self.fraction * n_dissatisfied))


@dataclass
class RunStats:
    iterations: int = 0
    opinion_updates: int = 0
    rollbacks: int = 0
    votes_cast: int = 0
    votes_retracted: int = 0
    simultaneous_votes: int = 0
    """Votes cast by simultaneous steps, counted before any rollback."""

    @property
    def rollback_rate(self) -> float:
        """Retracted votes over attempted simultaneous votes."""
        if self.simultaneous_votes == 0:
            return 0.0
        return self.votes_retracted / self.simultaneous_votes


@dataclass
class VoteState:
    """Votes, opinions and the four PMP factor sets.

    A factor has an entry in `votes` iff it is not abstaining.
    """

    votes: dict[int, np.ndarray]
    opinions: dict[int, np.ndarray]
    abstaining: set[int]
    changing: set[int]
    reacting: set[int]
    dissatisfied: set[int]
    confidence: dict[int, float] = field(default_factory=dict)
    iteration: int = 0
    stats: RunStats = field(default_factory=RunStats)
    cost: CostTuple | None = None
    cost_history: list[CostTuple] = field(default_factory=list)

    def snapshot_votes(self) -> tuple[dict[int, np.ndarray], frozenset[int]]:
        return dict(self.votes), frozenset(self.abstaining)


class RunStatus(Enum):
    CONVERGED = "converged"
    NON_CONVERGED = "non_converged"


@dataclass
class RunResult:
    assignment: Assignment
    cost: CostTuple
    stats: RunStats
    status: RunStatus
    votes: dict[int, np.ndarray]
    abstaining: frozenset[int]
    cost_history: list[CostTuple] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is RunStatus.CONVERGED

    def raise_for_status(self) -> RunResult:
        """Raise NonConvergedError (carrying this result) unless converged."""
        if not self.converged:
            raise NonConvergedError(self)
        return self
