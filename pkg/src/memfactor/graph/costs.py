"""Global and active costs of a vote configuration, and the optimal assignment.

The global cost sums, over every factor and every edge (i, a), the edge
weight times the mismatch between x[i] and the factor's vote for i. The
active cost is the same sum over non-abstaining factors only.

A vote outside its factor's table has infinite selection cost; that raises
`InfeasibleVoteError` instead of returning infinity.
"""

from __future__ import annotations

from collections.abc import Collection, Mapping
from dataclasses import dataclass

import numpy as np

from memfactor.graph.network import Network
from memfactor.kernels import local_minimizer
from memfactor.validation import InfeasibleVoteError, StructuralError, ValidationError

Votes = Mapping[int, np.ndarray]

_QUADRATIC = (0, 3)  # real, complex
_INTEGER = 1
_LABEL = 2


@dataclass(frozen=True, order=True)
class CostTuple:
    """(abstain count, active cost), compared lexicographically."""

    abstain_count: int
    active_cost: float

    def __str__(self) -> str:
        return f"(abstaining={self.abstain_count}, cost={self.active_cost:.6g})"


@dataclass(frozen=True)
class Assignment:
    """Variable values, with a known-mask standing in for the Unknown flag."""

    values: np.ndarray
    known: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __getitem__(self, i: int) -> float | complex | None:
        """Value of variable i, or None when Unknown."""
        if not self.known[i]:
            return None
        return self.values[i].item()

    def is_known(self, i: int) -> bool:
        return bool(self.known[i])

    @property
    def output_set(self) -> list[int]:
        """Variables with a value (adjacent to at least one non-abstaining factor)."""
        return [int(i) for i in np.flatnonzero(self.known)]

    @classmethod
    def from_mapping(cls, n: int, values: Mapping[int, float | complex], complex_: bool = False) -> Assignment:
        arr = np.zeros(n, dtype=np.complex128 if complex_ else np.float64)
        known = np.zeros(n, dtype=bool)
        for i, v in values.items():
            arr[i] = v
            known[i] = True
        return cls(arr, known)

    def filled(self, fallback: np.ndarray | float = 0.0) -> np.ndarray:
        """Dense copy with Unknown entries replaced by `fallback`."""
        return np.where(self.known, self.values, fallback)


def _edge_arrays(net: Network, votes: Votes, abstaining: Collection[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten the non-abstaining votes into (variable, value, weight) edge arrays."""
    var_parts: list[np.ndarray] = []
    val_parts: list[np.ndarray] = []
    w_parts: list[np.ndarray] = []
    for a in sorted(votes):
        if a in abstaining:
            continue
        fac = net.factors[a]
        vote = np.asarray(votes[a])
        if vote.shape != (fac.degree,):
            raise ValidationError(f"Factor {a} vote has shape {vote.shape}, expected ({fac.degree},)")
        var_parts.append(np.asarray(fac.neighbors, dtype=np.int64))
        val_parts.append(vote)
        w_parts.append(np.asarray(fac.weights, dtype=np.float64))
    if not var_parts:
        dtype = np.complex128 if net.has_complex else np.float64
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=dtype), np.zeros(0)
    return np.concatenate(var_parts), np.concatenate(val_parts), np.concatenate(w_parts)


def _require_votes(net: Network, votes: Votes, abstaining: Collection[int]) -> None:
    for fac in net.factors:
        if fac.id not in abstaining and fac.id not in votes:
            raise ValidationError(f"Factor {fac.id} is not abstaining but has no vote")


def _check_feasible(net: Network, votes: Votes, abstaining: Collection[int]) -> None:
    for a in sorted(votes):
        if a in abstaining:
            continue
        payload = net.factors[a].payload
        if payload is None:
            raise StructuralError(f"Factor {a} has no payload bound")
        if not payload.is_feasible(votes[a]):
            raise InfeasibleVoteError(a)


def active_cost(
    net: Network,
    votes: Votes,
    x: Assignment,
    abstaining: Collection[int],
    check_feasible: bool = True,
) -> float:
    """Cost of x restricted to non-abstaining factors.

    Raises:
        ValidationError: If a participating factor has no vote or x leaves a
            variable in scope Unknown.
        InfeasibleVoteError: If a vote has infinite selection cost.
    """
    _require_votes(net, votes, abstaining)
    if check_feasible:
        _check_feasible(net, votes, abstaining)
    var, val, w = _edge_arrays(net, votes, abstaining)
    if var.size == 0:
        return 0.0
    if not np.all(x.known[var]):
        missing = int(var[~x.known[var]][0])
        raise ValidationError(f"Assignment leaves variable {missing} Unknown but it is in scope")

    codes = net.kind_codes[var]
    xv = x.values[var]
    diff = xv - val
    mismatch = np.where(
        np.isin(codes, _QUADRATIC),
        np.abs(diff) ** 2,
        np.where(codes == _INTEGER, np.abs(diff), (np.real(diff) != 0).astype(np.float64)),
    )
    return float(np.sum(w * mismatch))


def global_cost(net: Network, votes: Votes, x: Assignment, check_feasible: bool = True) -> float:
    """Cost of x over every factor; all factors must have voted."""
    return active_cost(net, votes, x, frozenset(), check_feasible)


def optimal_assignment(net: Network, votes: Votes, abstaining: Collection[int]) -> Assignment:
    """Minimize the active cost over x given the votes, variable by variable.

    Variables with no non-abstaining neighbor are Unknown. Real/complex
    variables take the weighted mean; integer the lower median; label the
    smallest mode.
    """
    n = net.n_variables
    complex_ = net.has_complex
    values = np.zeros(n, dtype=np.complex128 if complex_ else np.float64)
    known = np.zeros(n, dtype=bool)

    var, val, w = _edge_arrays(net, votes, abstaining)
    if var.size == 0:
        return Assignment(values, known)

    counts = np.bincount(var, minlength=n)
    den = np.bincount(var, weights=w, minlength=n)
    quad = np.isin(net.kind_codes, _QUADRATIC)
    direct = quad & (counts > 0) & (den > 0)
    re = np.bincount(var, weights=w * np.real(val), minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = re / den
        if complex_:
            im = np.bincount(var, weights=w * np.imag(val), minlength=n)
            mean = mean + 1j * (im / den)
    values[direct] = mean[direct]
    known[direct] = True

    rest = np.flatnonzero((counts > 0) & ~direct)
    if rest.size:
        order = np.argsort(var, kind="stable")
        starts = np.searchsorted(var[order], rest, side="left")
        for i, s in zip(rest, starts, strict=True):
            idx = order[s : s + counts[i]]
            votes_i = [(val[k].item(), float(w[k])) for k in idx]
            values[i] = local_minimizer(net.kind(int(i)), votes_i)
            known[i] = True
    return Assignment(values, known)


def cost_tuple(net: Network, votes: Votes, abstaining: Collection[int]) -> CostTuple:
    """Abstain count and active cost at the optimal assignment for the current votes."""
    x = optimal_assignment(net, votes, abstaining)
    return CostTuple(len(abstaining), active_cost(net, votes, x, abstaining, check_feasible=False))
