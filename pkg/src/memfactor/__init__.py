"""Memory factor networks with proactive message passing."""

from memfactor.__main__ import main

__all__ = ["main"]
