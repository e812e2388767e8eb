"""Factor-network data model and cost functions."""

from memfactor.graph.costs import (
    Assignment,
    CostTuple,
    active_cost,
    cost_tuple,
    global_cost,
    optimal_assignment,
)
from memfactor.graph.kinds import ComplexKind, IntegerKind, LabelKind, RealKind, VariableKind, mismatch
from memfactor.graph.network import (
    FactorClass,
    FactorNode,
    Incidence,
    Network,
    NetworkBuilder,
    VariableNode,
    attach_evidence,
)

__all__ = [
    "Assignment",
    "ComplexKind",
    "CostTuple",
    "FactorClass",
    "FactorNode",
    "Incidence",
    "IntegerKind",
    "LabelKind",
    "Network",
    "NetworkBuilder",
    "RealKind",
    "VariableKind",
    "VariableNode",
    "active_cost",
    "attach_evidence",
    "cost_tuple",
    "global_cost",
    "mismatch",
    "optimal_assignment",
]
