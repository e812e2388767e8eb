"""Network skeletons as JSON documents.

Memory-factor payloads are not embedded; they live in model directories and
are re-bound by payload key. Evidence factors carry their observed value.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, ClassVar

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from memfactor.factors.table import MemoryTable
from memfactor.graph.kinds import kind_from_dict, kind_to_dict
from memfactor.graph.network import FactorClass, Network, NetworkBuilder
from memfactor.validation import ModelFormatError

DOCUMENT_VERSION = 1


class FactorDocument(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid")

    neighbors: list[int]
    weights: list[float]
    payload_key: str | None = None
    evidence: float | tuple[float, float] | None = None
    """Observed value of an evidence factor; complex values as (re, im)."""


class NetworkDocument(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid")

    version: int = DOCUMENT_VERSION
    variables: list[dict[str, Any]] = Field(default_factory=list)
    factors: list[FactorDocument] = Field(default_factory=list)

    @classmethod
    def from_network(cls, net: Network) -> NetworkDocument:
        factors = []
        for fac in net.factors:
            evidence = None
            if fac.cls is FactorClass.EVIDENCE:
                assert isinstance(fac.payload, MemoryTable)
                value = fac.payload.rows[0, 0]
                evidence = (float(value.real), float(value.imag)) if isinstance(value, complex) else float(value)
            factors.append(FactorDocument(
                neighbors=list(fac.neighbors),
                weights=list(fac.weights),
                payload_key=fac.payload_key,
                evidence=evidence,
            ))
        return cls(variables=[kind_to_dict(v.kind) for v in net.variables], factors=factors)

    def to_network(self) -> Network:
        b = NetworkBuilder()
        for kind in self.variables:
            b.add_variable(kind_from_dict(kind))
        for fac in self.factors:
            if fac.evidence is None:
                b.add_factor(fac.neighbors, fac.weights, payload_key=fac.payload_key)
                continue
            value = complex(*fac.evidence) if isinstance(fac.evidence, tuple) else fac.evidence
            if len(fac.neighbors) != 1:
                raise ModelFormatError(f"Evidence factor with {len(fac.neighbors)} neighbors")
            b.add_evidence(fac.neighbors[0], value, fac.weights[0])
        return b.build()


def save_network(path: Path | str, net: Network) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(NetworkDocument.from_network(net).model_dump_json(indent=2) + "\n")
    return path


def load_network(path: Path | str) -> Network:
    """Raises ModelFormatError if the document fails schema validation or has another version."""
    path = Path(path)
    try:
        doc = NetworkDocument.model_validate_json(path.read_text())
    except PydanticValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ModelFormatError(f"{path}: invalid key '{key}': {first['msg']}") from e
    if doc.version != DOCUMENT_VERSION:
        raise ModelFormatError(f"{path}: document version {doc.version}, expected {DOCUMENT_VERSION}")
    return doc.to_network()
