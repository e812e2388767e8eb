"""Logging for memfactor.

A thin wrapper around Python's logging module that:
- Prints human-readable, level-prefixed lines to stdout by default
- Can add a rotating file handler (MFN_LOG_FILE or --log-file)
- Keeps user-facing command output (`print`) separate from diagnostics (`log`)

Usage:
    from memfactor.log import log, print

    print(f"restored {n_perfect}/{n_trials} images")   # command output
    log.debug(f"iter {it}: abstaining={abstain} cost={cost:.6g}")
    log.set_level("DEBUG")
"""

from __future__ import annotations

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import IO, ClassVar

if sys.version_info >= (3, 12):
    from typing import override
else:
    from typing_extensions import override


def _fmt_time(record: logging.LogRecord, format: str = "%Y-%m-%d %H:%M:%S") -> str:
    """Format the timestamp of a log record."""
    return datetime.fromtimestamp(record.created).strftime(format)


class MfnLogger:
    """Centralized logger for memfactor.

    Library code logs engine and solver events at DEBUG; commands surface
    results through `print` below.
    """

    LEVELS: ClassVar[dict[str, int]] = {
        "DEBUG": logging.DEBUG,
        "INFO": logging.INFO,
        "WARN": logging.WARNING,
        "WARNING": logging.WARNING,
        "ERROR": logging.ERROR,
        "CRITICAL": logging.CRITICAL,
    }

    _logger: logging.Logger

    def __init__(self, name: str = "memfactor"):
        self._logger = logging.getLogger(name)
        self._logger.setLevel(logging.DEBUG)  # filter at handler

        if not self._logger.handlers:
            self._add_console_handler()

    def _add_console_handler(self) -> None:
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(logging.WARNING)
        handler.setFormatter(MfnFormatter())
        self._logger.addHandler(handler)

    def _resolve(self, level: str | int, default: int) -> int:
        if isinstance(level, str):
            return self.LEVELS.get(level.upper(), default)
        return level

    def set_level(self, level: str | int) -> None:
        """Set the minimum level for console output.

        Args:
            level: "DEBUG", "INFO", "WARN", "ERROR" or logging constant
        """
        resolved = self._resolve(level, logging.INFO)
        for handler in self._logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                handler.setLevel(resolved)

    def add_file_handler(
        self,
        path: str | Path,
        level: str | int = "DEBUG",
        max_bytes: int = 10_000_000,
        backup_count: int = 3,
    ) -> None:
        """Add a rotating file handler with timestamped records."""
        from logging.handlers import RotatingFileHandler

        handler = RotatingFileHandler(path, maxBytes=max_bytes, backupCount=backup_count)
        handler.setLevel(self._resolve(level, logging.DEBUG))
        handler.setFormatter(MfnFormatter(include_timestamp=True, use_colors=False))
        self._logger.addHandler(handler)

    def is_enabled(self, level: str | int) -> bool:
        """True if any handler would emit a record at this level."""
        resolved = self._resolve(level, logging.INFO)
        return any(h.level <= resolved for h in self._logger.handlers)

    def debug(self, msg: str) -> None:
        self._logger.debug(msg)

    def info(self, msg: str) -> None:
        self._logger.info(msg)

    def warn(self, msg: str) -> None:
        self._logger.warning(msg)

    def error(self, msg: str) -> None:
        self._logger.error(msg)

    def exception(self, msg: str) -> None:
        """Log error with exception traceback."""
        self._logger.exception(msg)


class MfnFormatter(logging.Formatter):
    """`[I] message` on the console, `[time] [I] message` in files."""

    COLORS: ClassVar[dict[int, str]] = {
        logging.DEBUG: "\033[36m",
        logging.INFO: "\033[32m",
        logging.WARNING: "\033[33m",
        logging.ERROR: "\033[31m",
        logging.CRITICAL: "\033[35m",
    }
    RESET: ClassVar[str] = "\033[0m"

    include_timestamp: bool
    use_colors: bool

    def __init__(self, include_timestamp: bool = False, use_colors: bool | None = None):
        super().__init__()
        self.include_timestamp = include_timestamp
        self.use_colors = use_colors if use_colors is not None else sys.stdout.isatty()

    @override
    def format(self, record: logging.LogRecord) -> str:
        parts: list[str] = []
        if self.include_timestamp:
            parts.append(f"[{_fmt_time(record)}]")

        level_char = record.levelname[0]
        if self.use_colors:
            parts.append(f"{self.COLORS.get(record.levelno, '')}[{level_char}]{self.RESET}")
        else:
            parts.append(f"[{level_char}]")

        parts.append(record.getMessage())
        return " ".join(parts)


log = MfnLogger()


class OutputWriter:
    """Writer for command output; no prefixes, redirectable to extra files."""

    _streams: list[IO[str]]

    def __init__(self) -> None:
        self._streams = [sys.stdout]

    def add_file(self, path: str | Path) -> None:
        self._streams.append(open(path, "a"))  # noqa: SIM115

    def write(self, *args: object, sep: str = " ", end: str = "\n") -> None:
        message = sep.join(str(arg) for arg in args) + end
        for stream in self._streams:
            _ = stream.write(message)
            stream.flush()


_output = OutputWriter()


def print(*args: object, sep: str = " ", end: str = "\n") -> None:  # noqa: A001
    """Drop-in replacement for print() routed through the output writer."""
    _output.write(*args, sep=sep, end=end)


def configure(level: str | None = None, log_file: Path | None = None) -> None:
    """Apply level/file settings from the environment or CLI flags."""
    if level:
        log.set_level(level)
    if log_file:
        log.add_file_handler(log_file)
