"""Factor payloads: memory tables and subspace factors."""

from memfactor.factors.base import FactorPayload, Opinion, OpinionContext, PayloadKind
from memfactor.factors.subspace import (
    ConfidencePenalty,
    HiddenDomain,
    SubspaceConfig,
    SubspaceFactor,
    subspace_confidence,
    subspace_opinion,
    subspace_satisfied,
)
from memfactor.factors.table import MemoryTable

__all__ = [
    "ConfidencePenalty",
    "FactorPayload",
    "HiddenDomain",
    "MemoryTable",
    "Opinion",
    "OpinionContext",
    "PayloadKind",
    "SubspaceConfig",
    "SubspaceFactor",
    "subspace_confidence",
    "subspace_opinion",
    "subspace_satisfied",
]
