"""Rectangular numeric CSV grids, written with 17 significant digits."""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from memfactor.validation import RaggedCsvError


def format_cell(value: float) -> str:
    """Locale-independent repr that round-trips a float64."""
    return "%.17g" % float(value)


def encode_csv_matrix(matrix: np.ndarray, header: Sequence[str] | None = None) -> str:
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in arr:
        writer.writerow(format_cell(v) for v in row)
    return buf.getvalue()


def write_csv_matrix(path: Path | str, matrix: np.ndarray, header: Sequence[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(encode_csv_matrix(matrix, header))
    return path


def decode_csv_matrix(text: str, has_header: bool = False, source: str = "<text>") -> np.ndarray:
    """Parse a CSV grid of floats.

    Raises:
        RaggedCsvError: If rows differ in length, a cell is not numeric, or
            there are no data rows.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if has_header:
        rows = rows[1:]
    if not rows:
        raise RaggedCsvError(f"{source}: no data rows")
    width = len(rows[0])
    for n, row in enumerate(rows, start=1):
        if len(row) != width:
            raise RaggedCsvError(f"{source}: row {n} has {len(row)} cells, expected {width}")
    try:
        return np.array([[float(c) for c in row] for row in rows], dtype=np.float64)
    except ValueError as e:
        raise RaggedCsvError(f"{source}: non-numeric cell ({e})") from e


def read_csv_matrix(path: Path | str, has_header: bool = False) -> np.ndarray:
    path = Path(path)
    return decode_csv_matrix(path.read_text(), has_header, str(path))


def write_csv_rows(path: Path | str, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    """Mixed-type rows (metrics, traces); floats use the 17-digit format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(format_cell(v) if isinstance(v, float) else v for v in row)
    return path


def read_labels(path: Path | str) -> dict[str, int]:
    """`filename,label` rows (no header) as a mapping.

    Raises:
        RaggedCsvError: If a row does not have two cells or the label is not an integer.
    """
    path = Path(path)
    labels: dict[str, int] = {}
    for n, row in enumerate(csv.reader(io.StringIO(path.read_text())), start=1):
        if not row:
            continue
        if len(row) != 2:
            raise RaggedCsvError(f"{path}: row {n} has {len(row)} cells, expected filename,label")
        try:
            labels[row[0].strip()] = int(row[1])
        except ValueError as e:
            raise RaggedCsvError(f"{path}: row {n} label is not an integer ({e})") from e
    return labels


def write_labels(path: Path | str, labels: Sequence[tuple[str, int]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(labels)
    return path
