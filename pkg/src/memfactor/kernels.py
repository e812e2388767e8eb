"""Per-variable message summaries and incremental opinion costs.

A factor deciding what to vote for variable i only needs a sufficient
statistic of the other non-abstaining votes on i:

- real / complex: weighted mean x~ and the external weight
- integer (equal weights): the median interval [l, u]
- label (equal weights): the set of modes

Given that summary, the cost of the factor casting `candidate` (after the
variable is re-optimized) is, up to a candidate-independent constant:

- real:    w (W - w) / W * |candidate - x~|^2,   W = external weight + w
- integer: w * d(candidate, [l, u])
- label:   w * [candidate not a mode]
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from memfactor.graph.kinds import ComplexKind, IntegerKind, LabelKind, RealKind, VariableKind, mismatch
from memfactor.validation import KernelValidationError

Vote = tuple[float | complex, float]


@dataclass(frozen=True, slots=True)
class EmptySummary:
    """No external votes on the variable."""

    count: int = 0


@dataclass(frozen=True, slots=True)
class RealSummary:
    x_tilde: float | complex
    external_weight: float
    count: int


@dataclass(frozen=True, slots=True)
class IntSummary:
    l: int  # noqa: E741
    u: int
    count: int


@dataclass(frozen=True, slots=True)
class LabelSummary:
    mode_set: int
    """Bit set over the label domain: bit k set iff label k is a mode."""
    count: int

    def __contains__(self, label: object) -> bool:
        return bool((self.mode_set >> int(label)) & 1)  # type: ignore[call-overload]

    @property
    def members(self) -> list[int]:
        out: list[int] = []
        bits, k = self.mode_set, 0
        while bits:
            if bits & 1:
                out.append(k)
            bits >>= 1
            k += 1
        return out


Summary = EmptySummary | RealSummary | IntSummary | LabelSummary

EMPTY = EmptySummary()


def _check_weights(kind: VariableKind, votes: Sequence[Vote]) -> None:
    for _, w in votes:
        if not math.isfinite(w) or w < 0:
            raise KernelValidationError(f"Vote weights must be finite and nonnegative, got {w}")
    if isinstance(kind, IntegerKind | LabelKind):
        first = votes[0][1]
        if any(w != first for _, w in votes):
            raise KernelValidationError(f"{type(kind).__name__} variables require equal vote weights")


def median_interval(values: Sequence[int]) -> tuple[int, int]:
    """Median set [l, u] of an equal-weight integer multiset."""
    ordered = sorted(values)
    n = len(ordered)
    half = (n + 1) // 2  # ceil(n / 2)
    return int(ordered[half - 1]), int(ordered[n - half])


def mode_mask(values: Sequence[int]) -> int:
    counts = Counter(int(v) for v in values)
    top = max(counts.values())
    mask = 0
    for label, c in counts.items():
        if c == top:
            mask |= 1 << label
    return mask


def summarize(kind: VariableKind, votes: Sequence[Vote]) -> Summary:
    """Build the message m(i -> a) from the external votes on one variable.

    Args:
        kind: The variable's kind.
        votes: (value, weight) pairs from non-abstaining neighbors other than a.

    Raises:
        KernelValidationError: On negative weights, or unequal weights on an
            integer/label variable.
    """
    if not votes:
        return EMPTY
    _check_weights(kind, votes)

    match kind:
        case RealKind() | ComplexKind():
            total = math.fsum(w for _, w in votes)
            if total == 0:
                return EMPTY
            if isinstance(kind, ComplexKind):
                re = math.fsum(w * complex(v).real for v, w in votes)
                im = math.fsum(w * complex(v).imag for v, w in votes)
                return RealSummary(complex(re, im) / total, total, len(votes))
            return RealSummary(math.fsum(w * float(v) for v, w in votes) / total, total, len(votes))
        case IntegerKind():
            lo, hi = median_interval([int(v) for v, _ in votes])
            return IntSummary(lo, hi, len(votes))
        case LabelKind():
            return LabelSummary(mode_mask([int(v) for v, _ in votes]), len(votes))
    raise KernelValidationError(f"Unknown variable kind: {kind!r}")


def interval_distance(z: int, l: int, u: int) -> int:  # noqa: E741
    """Distance from z to the closed interval [l, u]."""
    if z > u:
        return z - u
    if z < l:
        return l - z
    return 0


def _real_scale(summary: RealSummary, w: float, W: float | None) -> float:
    ext = summary.external_weight
    if W is None:
        W = ext + w
    elif W < w:
        raise KernelValidationError(f"Total weight W={W} is smaller than the edge weight w={w}")
    else:
        ext = W - w
    if W <= 0:
        return 0.0
    return w * ext / W


def incremental_cost(candidate: float | complex, summary: Summary, w: float, W: float | None = None) -> float:
    """Incremental cost of a factor voting `candidate` on one variable.

    Args:
        candidate: Proposed vote value.
        summary: Message built from the variable's external votes.
        w: Weight of the voting edge.
        W: Total non-abstaining weight on the variable including w. Derived
            from the summary when omitted.

    Raises:
        KernelValidationError: If W < w.
    """
    match summary:
        case EmptySummary():
            return 0.0
        case RealSummary():
            return _real_scale(summary, w, W) * float(abs(candidate - summary.x_tilde) ** 2)
        case IntSummary(l=lo, u=hi):
            return w * float(interval_distance(int(candidate), lo, hi))
        case LabelSummary():
            return 0.0 if candidate in summary else float(w)
    raise KernelValidationError(f"Unknown summary: {summary!r}")


def incremental_costs(candidates: np.ndarray, summary: Summary, w: float) -> np.ndarray:
    """Vectorised `incremental_cost` over an array of candidate values."""
    match summary:
        case EmptySummary():
            return np.zeros(candidates.shape, dtype=np.float64)
        case RealSummary():
            return _real_scale(summary, w, None) * np.abs(candidates - summary.x_tilde) ** 2
        case IntSummary(l=lo, u=hi):
            return w * (np.maximum(candidates - hi, 0) + np.maximum(lo - candidates, 0)).astype(np.float64)
        case LabelSummary():
            members = np.asarray(summary.members, dtype=np.float64)
            return np.where(np.isin(candidates, members), 0.0, float(w))
    raise KernelValidationError(f"Unknown summary: {summary!r}")


def local_minimizer(kind: VariableKind, votes: Sequence[Vote]) -> float | complex:
    """Value minimizing the weighted mismatch to `votes`, with deterministic representatives.

    Real: weighted mean. Integer: lower end of the median interval.
    Label: smallest mode.

    Raises:
        KernelValidationError: If `votes` is empty (the caller emits Unknown).
    """
    if not votes:
        raise KernelValidationError("local_minimizer needs at least one vote")
    summary = summarize(kind, votes)
    match summary:
        case RealSummary(x_tilde=x):
            return x
        case IntSummary(l=lo):
            return lo
        case LabelSummary():
            return summary.members[0]
        case EmptySummary():
            # every weight is zero; any vote minimizes
            return votes[0][0]
    raise KernelValidationError(f"Unknown summary: {summary!r}")


def brute_force_inner_min(
    kind: VariableKind, candidate: float | complex, w: float, external_votes: Sequence[Vote]
) -> float:
    """Smallest total weighted mismatch to `candidate` plus `external_votes`, solved directly.

    Closed form for real/complex, exhaustive search for integer and label.
    Used as a testing oracle for `incremental_cost`.
    """
    all_votes = [(candidate, w), *external_votes]

    def total(x: float | complex) -> float:
        return math.fsum(wb * mismatch(kind, x, vb) for vb, wb in all_votes)

    match kind:
        case RealKind() | ComplexKind():
            weight = math.fsum(wb for _, wb in all_votes)
            if weight == 0:
                return 0.0
            return total(sum(wb * vb for vb, wb in all_votes) / weight)
        case IntegerKind():
            values = [int(v) for v, _ in all_votes]
            return min(total(x) for x in range(min(values) - 1, max(values) + 2))
        case LabelKind(size=size):
            return min(total(x) for x in range(size))
    raise KernelValidationError(f"Unknown variable kind: {kind!r}")
