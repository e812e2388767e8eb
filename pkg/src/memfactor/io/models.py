"""Binary payload files plus a JSON manifest per model directory.

Payload files are little-endian:

    magic (4)  version u16  dtype u8  extra u8  rows u32  cols u32  data  crc32 u32

`MFNT` tables store the L x n rows; `MFNW` subspaces store the n x p basis
and put the hidden domain in `extra`. The CRC covers every preceding byte.
A shared payload is written once; the manifest maps each factor key to it.
"""

from __future__ import annotations

import hashlib
import struct
import zlib
from pathlib import Path
from typing import Any, ClassVar, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as PydanticValidationError

from memfactor.factors.base import FactorPayload
from memfactor.factors.subspace import HiddenDomain, SubspaceConfig, SubspaceFactor
from memfactor.factors.table import MemoryTable
from memfactor.log import log
from memfactor.validation import ChecksumError, ModelFormatError

FORMAT_VERSION = 1
MANIFEST_NAME = "model.json"

TABLE_MAGIC = b"MFNT"
SUBSPACE_MAGIC = b"MFNW"

_HEADER = struct.Struct("<4sHBBII")
_CRC = struct.Struct("<I")
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<c16")}
_DOMAINS = {0: HiddenDomain.REALS, 1: HiddenDomain.NONNEG, 2: HiddenDomain.COMPLEX}


class PayloadEntry(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid")

    file: str
    kind: Literal["table", "subspace"]
    rows: int
    cols: int
    trainer: str
    residual: float | None = None


class ModelManifest(BaseModel):
    """Sidecar describing every payload of a trained model."""

    model_config: ClassVar[ConfigDict] = ConfigDict(extra="forbid")

    version: int = FORMAT_VERSION
    task: str
    layout: dict[str, Any] = Field(default_factory=dict)
    payloads: dict[str, PayloadEntry] = Field(default_factory=dict)
    """payload key -> file entry; several keys may share one file."""


# --- Single payloads ---


def encode_payload(payload: FactorPayload) -> bytes:
    if isinstance(payload, MemoryTable):
        magic, data, extra = TABLE_MAGIC, payload.rows, 0
    elif isinstance(payload, SubspaceFactor):
        domain_code = {v: k for k, v in _DOMAINS.items()}[payload.domain]
        magic, data, extra = SUBSPACE_MAGIC, payload.W, domain_code
    else:
        raise ModelFormatError(f"Cannot serialize payload of type {type(payload).__name__}")
    dtype_code = 1 if np.iscomplexobj(data) else 0
    body = _HEADER.pack(magic, FORMAT_VERSION, dtype_code, extra, data.shape[0], data.shape[1])
    body += np.ascontiguousarray(data, dtype=_DTYPES[dtype_code]).tobytes()
    return body + _CRC.pack(zlib.crc32(body))


def decode_payload(raw: bytes, source: str = "<bytes>", config: SubspaceConfig | None = None) -> FactorPayload:
    """Decode one payload file.

    Raises:
        ModelFormatError: Bad magic, unsupported version or size mismatch.
        ChecksumError: CRC32 does not match.
    """
    if len(raw) < _HEADER.size + _CRC.size:
        raise ModelFormatError(f"{source}: file too short for a payload header")
    magic, version, dtype_code, extra, rows, cols = _HEADER.unpack_from(raw)
    if magic not in (TABLE_MAGIC, SUBSPACE_MAGIC):
        raise ModelFormatError(f"{source}: unknown magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"{source}: format version {version}, expected {FORMAT_VERSION}")
    if dtype_code not in _DTYPES:
        raise ModelFormatError(f"{source}: unknown dtype code {dtype_code}")
    dtype = _DTYPES[dtype_code]
    end = _HEADER.size + rows * cols * dtype.itemsize
    if len(raw) != end + _CRC.size:
        raise ModelFormatError(f"{source}: {len(raw)} bytes, header promises {end + _CRC.size}")
    (stored,) = _CRC.unpack_from(raw, end)
    if zlib.crc32(raw[:end]) != stored:
        raise ChecksumError(f"{source}: checksum mismatch")
    data = np.frombuffer(raw, dtype=dtype, count=rows * cols, offset=_HEADER.size).reshape(rows, cols)
    if magic == TABLE_MAGIC:
        return MemoryTable(data.copy())
    if extra not in _DOMAINS:
        raise ModelFormatError(f"{source}: unknown hidden domain code {extra}")
    return SubspaceFactor(data.copy(), _DOMAINS[extra], config)


def save_payload(path: Path | str, payload: FactorPayload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_payload(payload))
    return path


def load_payload(path: Path | str, config: SubspaceConfig | None = None) -> FactorPayload:
    path = Path(path)
    return decode_payload(path.read_bytes(), str(path), config)


# --- Model directories ---


def _file_name(key: str, payload: FactorPayload) -> str:
    digest = hashlib.sha1(key.encode()).hexdigest()[:12]
    ext = "mfnt" if isinstance(payload, MemoryTable) else "mfnw"
    return f"{digest}.{ext}"


def save_model(
    directory: Path | str,
    payloads: dict[str, FactorPayload],
    task: str,
    layout: dict[str, Any] | None = None,
    trainer: str = "table",
    residuals: dict[str, float | None] | None = None,
) -> ModelManifest:
    """Write each distinct payload once, then the manifest.

    Returns:
        The manifest that was written.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    residuals = residuals or {}
    written: dict[int, str] = {}
    entries: dict[str, PayloadEntry] = {}
    for key in sorted(payloads):
        payload = payloads[key]
        name = written.get(id(payload))
        if name is None:
            name = _file_name(key, payload)
            save_payload(directory / name, payload)
            written[id(payload)] = name
        data = payload.rows if isinstance(payload, MemoryTable) else payload.W  # type: ignore[attr-defined]
        entries[key] = PayloadEntry(
            file=name,
            kind="table" if isinstance(payload, MemoryTable) else "subspace",
            rows=int(data.shape[0]),
            cols=int(data.shape[1]),
            trainer=trainer,
            residual=residuals.get(key),
        )
    manifest = ModelManifest(task=task, layout=layout or {}, payloads=entries)
    (directory / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")
    log.debug(f"saved {len(written)} payload files for {len(entries)} keys to {directory}")
    return manifest


def load_manifest(directory: Path | str) -> ModelManifest:
    path = Path(directory) / MANIFEST_NAME
    try:
        manifest = ModelManifest.model_validate_json(path.read_text())
    except PydanticValidationError as e:
        raise ModelFormatError(f"{path}: invalid manifest ({e.errors()[0]['msg']})") from e
    if manifest.version != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: manifest version {manifest.version}, expected {FORMAT_VERSION}")
    return manifest


def load_model(
    directory: Path | str,
    config: SubspaceConfig | None = None,
) -> tuple[dict[str, FactorPayload], ModelManifest]:
    """Load every payload; keys that share a file share one payload object."""
    directory = Path(directory)
    manifest = load_manifest(directory)
    cache: dict[str, FactorPayload] = {}
    payloads: dict[str, FactorPayload] = {}
    for key, entry in manifest.payloads.items():
        if entry.file not in cache:
            cache[entry.file] = load_payload(directory / entry.file, config)
        payloads[key] = cache[entry.file]
    return payloads, manifest
