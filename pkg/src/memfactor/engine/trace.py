"""Per-iteration convergence trace.

Writes `iter,abstain_count,active_cost,votes_cast,rollback` CSV rows, and
optionally echoes them through the debug log.
"""

import csv
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import TextIO

from memfactor.log import log


@dataclass
class TraceRow:
    """A single trace row."""

    iter: int
    abstain_count: int
    active_cost: float
    votes_cast: int
    rollback: int

    def to_csv(self) -> list[str]:
        return [str(v) if not isinstance(v, float) else repr(v) for v in astuple(self)]


class TraceRecorder:
    """Records trace rows to a CSV file and/or the debug log.

    Usage:
        with TraceRecorder(Path("trace.csv")) as trace:
            PMPEngine(net, schedule, trace=trace).run()
    """

    HEADER = ("iter", "abstain_count", "active_cost", "votes_cast", "rollback")

    def __init__(self, output_path: Path | None = None, echo: bool = False):
        """Initialize the recorder.

        Args:
            output_path: CSV file to write. If None, rows are only kept in memory.
            echo: Also log each row at DEBUG.
        """
        self.output_path = output_path
        self.echo = echo
        self._file: TextIO | None = None
        self._writer = None
        self._rows: list[TraceRow] = []

    def _open_file(self) -> None:
        if self.output_path and self._file is None:
            self.output_path.parent.mkdir(parents=True, exist_ok=True)
            self._file = open(self.output_path, "w", newline="")  # noqa: SIM115
            self._writer = csv.writer(self._file, lineterminator="\n")
            self._writer.writerow(self.HEADER)

    def record(self, row: TraceRow) -> None:
        self._open_file()
        self._rows.append(row)
        if self._writer is not None and self._file is not None:
            self._writer.writerow(row.to_csv())
            self._file.flush()
        if self.echo:
            log.debug("trace " + ",".join(row.to_csv()))

    @property
    def rows(self) -> list[TraceRow]:
        return self._rows.copy()

    def close(self) -> None:
        if self._file:
            self._file.close()
            self._file = None
            self._writer = None

    def __enter__(self) -> "TraceRecorder":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
