"""Shared test fixtures and configuration."""

import numpy as np
import pytest

from memfactor.factors import MemoryTable
from memfactor.graph import Network, NetworkBuilder, RealKind


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so every test draws the same numbers."""
    return np.random.default_rng(1234)


@pytest.fixture
def chain_network() -> Network:
    """evidence - v0 - f1 - v1 - f2 - v2, with two-row tables on f1 and f2.

    Factor ids: 0 = evidence on v0 (value 1.0), 1 = table on (v0, v1),
    2 = table on (v1, v2).
    """
    b = NetworkBuilder()
    v = b.add_variables(RealKind(), 3)
    b.add_evidence(v[0], 1.0, weight=1.0)
    b.add_factor([v[0], v[1]], payload=MemoryTable([[0.0, 0.0], [1.0, 1.0]]))
    b.add_factor([v[1], v[2]], payload=MemoryTable([[0.0, 0.5], [1.0, 0.25]]))
    return b.build()


@pytest.fixture
def toy_network() -> Network:
    """Three real variables and two table factors, no evidence."""
    b = NetworkBuilder()
    v = b.add_variables(RealKind(), 3)
    b.add_factor([v[0], v[1]], weights=[1.0, 2.0], payload=MemoryTable([[1.0, 2.0], [3.0, 0.0]]))
    b.add_factor([v[1], v[2]], weights=[1.0, 0.5], payload=MemoryTable([[4.0, 1.0], [0.0, 2.0]]))
    return b.build()
