"""The factor network: variables, factors, weighted edges.

A `Network` is immutable once built and safe to share across threads.
Build one with `NetworkBuilder`, or derive one from an existing network
with `Network.bind` / `attach_evidence`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from memfactor.graph.kinds import ComplexKind, IntegerKind, LabelKind, VariableKind, kind_code, vote_dtype
from memfactor.validation import NetworkValidationError, StructuralError

if TYPE_CHECKING:
    from memfactor.factors.base import FactorPayload


class FactorClass(Enum):
    MEMORY = "memory"
    EVIDENCE = "evidence"


@dataclass(frozen=True)
class VariableNode:
    id: int
    kind: VariableKind


@dataclass(frozen=True)
class FactorNode:
    id: int
    cls: FactorClass
    neighbors: tuple[int, ...]
    weights: tuple[float, ...]
    payload: FactorPayload | None = None
    payload_key: str | None = None
    """Name under which a trained payload is looked up (shared payloads share a key)."""

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    @property
    def is_evidence(self) -> bool:
        return self.cls is FactorClass.EVIDENCE


@dataclass(frozen=True, slots=True)
class Incidence:
    """One edge seen from its variable: factor id, column in the factor, weight."""

    factor: int
    column: int
    weight: float


class Network:
    """Edge-weighted bipartite graph of variables and factors.

    Raises:
        NetworkValidationError: If ids are not dense, neighbor lists are
            invalid, weights are negative, integer/label variables carry
            unequal weights, or an evidence factor is not a one-row table
            on a single variable.
    """

    variables: tuple[VariableNode, ...]
    factors: tuple[FactorNode, ...]

    def __init__(
        self,
        variables: Sequence[VariableNode],
        factors: Sequence[FactorNode],
        *,
        _checked_payloads: frozenset[int] = frozenset(),
    ):
        self.variables = tuple(variables)
        self.factors = tuple(factors)
        for idx, var in enumerate(self.variables):
            if var.id != idx:
                raise NetworkValidationError(f"Variable ids must be dense 0..N-1; position {idx} has id {var.id}")
        for idx, fac in enumerate(self.factors):
            if fac.id != idx:
                raise NetworkValidationError(f"Factor ids must be dense 0..M-1; position {idx} has id {fac.id}")

        incidence: list[list[Incidence]] = [[] for _ in self.variables]
        for fac in self.factors:
            self._validate_factor(fac, check_payload=fac.id not in _checked_payloads)
            for j, (i, w) in enumerate(zip(fac.neighbors, fac.weights, strict=True)):
                incidence[i].append(Incidence(fac.id, j, w))
        self._incidence = tuple(tuple(edges) for edges in incidence)
        self.kind_codes = np.array([kind_code(v.kind) for v in self.variables], dtype=np.int8)
        self.kind_codes.setflags(write=False)
        self.has_complex = any(isinstance(v.kind, ComplexKind) for v in self.variables)

        for var in self.variables:
            if isinstance(var.kind, IntegerKind | LabelKind):
                weights = {e.weight for e in self._incidence[var.id]}
                if len(weights) > 1:
                    raise NetworkValidationError(
                        f"Variable {var.id} ({type(var.kind).__name__}) has unequal edge weights {sorted(weights)}"
                    )

    def _validate_factor(self, fac: FactorNode, check_payload: bool) -> None:
        n_vars = len(self.variables)
        if not fac.neighbors:
            raise NetworkValidationError(f"Factor {fac.id} has no neighbors")
        if len(set(fac.neighbors)) != len(fac.neighbors):
            raise NetworkValidationError(f"Factor {fac.id} lists a neighbor twice")
        if len(fac.weights) != len(fac.neighbors):
            raise NetworkValidationError(f"Factor {fac.id}: {len(fac.weights)} weights for {fac.degree} neighbors")
        for i in fac.neighbors:
            if not 0 <= i < n_vars:
                raise NetworkValidationError(f"Factor {fac.id} references unknown variable {i}")
        for w in fac.weights:
            if not math.isfinite(w) or w < 0:
                raise NetworkValidationError(f"Factor {fac.id} has invalid weight {w}")

        if fac.is_evidence:
            from memfactor.factors.table import MemoryTable

            if fac.degree != 1:
                raise NetworkValidationError(f"Evidence factor {fac.id} must attach to exactly one variable")
            if not isinstance(fac.payload, MemoryTable) or fac.payload.n_rows != 1:
                raise NetworkValidationError(f"Evidence factor {fac.id} must carry a one-row table")

        if fac.payload is not None and check_payload:
            if fac.payload.degree != fac.degree:
                raise NetworkValidationError(
                    f"Factor {fac.id} has {fac.degree} neighbors but its payload has degree {fac.payload.degree}"
                )
            fac.payload.check_kinds(self.kinds_of_neighbors(fac.neighbors))

    # --- Queries ---

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def n_edges(self) -> int:
        return sum(f.degree for f in self.factors)

    def kind(self, i: int) -> VariableKind:
        return self.variables[i].kind

    def kinds_of_neighbors(self, neighbors: Iterable[int]) -> tuple[VariableKind, ...]:
        return tuple(self.variables[i].kind for i in neighbors)

    def kinds_of(self, a: int) -> tuple[VariableKind, ...]:
        return self.kinds_of_neighbors(self.factors[a].neighbors)

    def neighbors(self, a: int) -> tuple[int, ...]:
        """N(a), in column order."""
        return self.factors[a].neighbors

    def incidence(self, i: int) -> tuple[Incidence, ...]:
        """Edges of variable i, ascending factor id."""
        return self._incidence[i]

    def var_neighbors(self, i: int) -> tuple[int, ...]:
        """Factors adjacent to variable i, ascending."""
        return tuple(e.factor for e in self._incidence[i])

    def weight(self, i: int, a: int) -> float:
        fac = self.factors[a]
        return fac.weights[fac.neighbors.index(i)]

    @property
    def evidence_ids(self) -> list[int]:
        return [f.id for f in self.factors if f.is_evidence]

    @property
    def memory_ids(self) -> list[int]:
        return [f.id for f in self.factors if not f.is_evidence]

    def payload_keys(self) -> list[str]:
        """Distinct payload keys of memory factors, in first-seen order."""
        return list(dict.fromkeys(f.payload_key for f in self.factors if f.payload_key is not None))

    def factors_with_key(self, key: str) -> list[FactorNode]:
        return [f for f in self.factors if f.payload_key == key]

    def vote_dtype(self, a: int) -> type:
        return vote_dtype(self.kinds_of(a))

    # --- Derivation ---

    def bind(self, payloads: Mapping[str, FactorPayload], partial: bool = False) -> Network:
        """Return a network whose memory factors carry the payloads named by their keys.

        Raises:
            StructuralError: If a memory factor's key has no payload (unless
                `partial`).
            NetworkValidationError: If a payload's degree or alphabet does not
                fit its variables.
        """
        factors: list[FactorNode] = []
        for fac in self.factors:
            if fac.is_evidence or fac.payload_key is None:
                factors.append(fac)
                continue
            payload = payloads.get(fac.payload_key)
            if payload is None:
                if not partial:
                    raise StructuralError(f"No payload for factor {fac.id} (key '{fac.payload_key}')")
                factors.append(fac)
                continue
            factors.append(replace(fac, payload=payload))
        return Network(self.variables, factors)

    def with_evidence_weight(self, weight: float) -> Network:
        """Same network with every evidence edge re-weighted."""
        factors = [replace(f, weights=(weight,)) if f.is_evidence else f for f in self.factors]
        return Network(self.variables, factors, _checked_payloads=frozenset(f.id for f in factors))

    def without_evidence(self) -> Network:
        return Network(
            self.variables,
            [f for f in self.factors if not f.is_evidence],
            _checked_payloads=frozenset(range(self.n_factors)),
        )


class NetworkBuilder:
    """Incrementally assemble a `Network`.

    Usage:
        b = NetworkBuilder()
        x = b.add_variables(RealKind(), 3)
        b.add_factor(x, payload_key="patch")
        b.add_evidence(x[0], 0.5, weight=2.0)
        net = b.build()
    """

    def __init__(self) -> None:
        self._variables: list[VariableNode] = []
        self._factors: list[FactorNode] = []

    def add_variable(self, kind: VariableKind) -> int:
        vid = len(self._variables)
        self._variables.append(VariableNode(vid, kind))
        return vid

    def add_variables(self, kind: VariableKind, count: int) -> list[int]:
        return [self.add_variable(kind) for _ in range(count)]

    def add_factor(
        self,
        neighbors: Sequence[int],
        weights: float | Sequence[float] = 1.0,
        payload: FactorPayload | None = None,
        payload_key: str | None = None,
    ) -> int:
        if isinstance(weights, int | float):
            weights = [float(weights)] * len(neighbors)
        fid = len(self._factors)
        self._factors.append(
            FactorNode(
                fid,
                FactorClass.MEMORY,
                tuple(int(i) for i in neighbors),
                tuple(float(w) for w in weights),
                payload,
                payload_key,
            )
        )
        return fid

    def add_evidence(self, variable: int, value: float | complex, weight: float = 1.0) -> int:
        from memfactor.factors.table import MemoryTable

        fid = len(self._factors)
        kind = self._variables[variable].kind
        row = np.array([[value]], dtype=vote_dtype([kind]))
        self._factors.append(
            FactorNode(fid, FactorClass.EVIDENCE, (int(variable),), (float(weight),), MemoryTable(row))
        )
        return fid

    def build(self) -> Network:
        return Network(self._variables, self._factors)


def attach_evidence(net: Network, observations: Mapping[int, float | complex], weight: float) -> Network:
    """Return `net` plus one single-variable evidence factor per observed variable.

    Observations are attached in ascending variable id. Existing factors keep
    their ids, so votes recorded against `net` remain valid for its memory
    factors.
    """
    from memfactor.factors.table import MemoryTable

    factors = list(net.factors)
    for i in sorted(observations):
        if not 0 <= i < net.n_variables:
            raise NetworkValidationError(f"Observation for unknown variable {i}")
        row = np.array([[observations[i]]], dtype=vote_dtype([net.kind(i)]))
        factors.append(FactorNode(len(factors), FactorClass.EVIDENCE, (int(i),), (float(weight),), MemoryTable(row)))
    return Network(net.variables, factors, _checked_payloads=frozenset(range(net.n_factors)))
