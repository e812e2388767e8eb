"""Base classes for factor payloads."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

import numpy as np

from memfactor.graph.kinds import VariableKind
from memfactor.kernels import Summary


class PayloadKind(Enum):
    """Payload family, as stored in model files and network documents."""

    TABLE = "table"
    SUBSPACE = "subspace"


@dataclass(frozen=True)
class OpinionContext:
    """Everything a payload needs to form an opinion, aligned with its columns.

    Built by the engine from the current votes; the payload never sees the
    network itself.
    """

    kinds: tuple[VariableKind, ...]
    summaries: tuple[Summary, ...]
    weights: np.ndarray
    """w(i, a) per column."""
    previous_vote: np.ndarray | None
    """The factor's current vote, None while abstaining."""
    active_degrees: np.ndarray
    """Non-abstaining neighbor count of each column variable."""

    @property
    def support_counts(self) -> np.ndarray:
        """|S(i, a)|: external non-abstaining votes per column."""
        return np.array([s.count for s in self.summaries], dtype=np.int64)


@dataclass(frozen=True)
class Opinion:
    """A payload's answer for one factor."""

    values: np.ndarray
    confidence: float


class FactorPayload(ABC):
    """Abstract base class for memory-factor payloads.

    All payloads must provide:
    - degree: number of bound variables (columns)
    - opinion(): best vote vector and confidence given the summaries
    - satisfied(): the payload's "close enough" relation between opinion and vote
    - is_feasible(): whether a vote vector has finite selection cost
    """

    kind: PayloadKind

    @property
    @abstractmethod
    def degree(self) -> int: ...

    @abstractmethod
    def opinion(self, ctx: OpinionContext) -> Opinion:
        """Compute the opinion vector and confidence for the given messages."""
        ...

    @abstractmethod
    def satisfied(self, opinion: np.ndarray, vote: np.ndarray) -> bool: ...

    @abstractmethod
    def is_feasible(self, vote: np.ndarray) -> bool:
        """True iff the selection cost of `vote` is zero (finite)."""
        ...

    def check_kinds(self, kinds: tuple[VariableKind, ...]) -> None:
        """Raise if this payload cannot be bound to variables of these kinds."""
        return None
