"""Subspace payload: votes constrained to the column space of W.

Opinions solve a small weighted least-squares problem

    min_z  sum_i c_i |(W z)_i - x~_i|^2,   c_i = w_i (W_i - w_i) / W_i

over z in R^p, the nonnegative orthant, or C^p depending on the hidden
domain. Variables without external votes have c_i = 0: they drop out of the
objective but still receive (W z*)_i in the returned opinion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import nnls

from memfactor.factors.base import FactorPayload, Opinion, OpinionContext, PayloadKind
from memfactor.graph.kinds import ComplexKind, RealKind, VariableKind
from memfactor.kernels import RealSummary, Summary
from memfactor.log import log
from memfactor.validation import NetworkValidationError, StructuralError, validate_positive

_ARMIJO = 1e-4


class HiddenDomain(Enum):
    REALS = "reals"
    NONNEG = "nonneg"
    COMPLEX = "complex"


class ConfidencePenalty(Enum):
    """Where the few-votes penalty sits in the confidence score."""

    PER_VARIABLE = "per_variable"  # inside the 1/|N(a)| average
    UNSCALED = "unscaled"  # summed outside it


@dataclass(frozen=True)
class SubspaceConfig:
    lam: float = 1.0
    alpha: float | None = None
    """None means 1e-4 times the factor degree."""
    qp_max_iters: int = 1000
    qp_tolerance: float = 1e-10
    penalty: ConfidencePenalty = ConfidencePenalty.PER_VARIABLE

    def __post_init__(self) -> None:
        validate_positive("lambda", self.lam)
        if self.alpha is not None:
            validate_positive("alpha", self.alpha)
        validate_positive("qp_max_iters", self.qp_max_iters)
        validate_positive("qp_tolerance", self.qp_tolerance)

    def alpha_for(self, n: int) -> float:
        return self.alpha if self.alpha is not None else 1e-4 * n


@dataclass
class QPResult:
    z: np.ndarray
    objective: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)


def qp_coefficients(summaries: tuple[Summary, ...], weights: np.ndarray, complex_: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Per-variable coefficients c_i and targets x~_i (0 where there is no message)."""
    n = len(summaries)
    c = np.zeros(n, dtype=np.float64)
    x = np.zeros(n, dtype=np.complex128 if complex_ else np.float64)
    for i, s in enumerate(summaries):
        if isinstance(s, RealSummary):
            w = float(weights[i])
            total = s.external_weight + w
            c[i] = w * s.external_weight / total if total > 0 else 0.0
            x[i] = s.x_tilde
    return c, x


def qp_objective(W: np.ndarray, c: np.ndarray, x: np.ndarray, z: np.ndarray) -> float:
    r = W @ z - x
    return float(np.sum(c * np.abs(r) ** 2))


def solve_least_squares(W: np.ndarray, c: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Minimum-norm z* of the weighted problem (never aborts on rank deficiency)."""
    s = np.sqrt(c)
    z, *_ = np.linalg.lstsq(s[:, None] * W, s * x, rcond=None)
    return z


def solve_nonneg_qp(
    W: np.ndarray,
    c: np.ndarray,
    x: np.ndarray,
    max_iters: int = 1000,
    tol: float = 1e-10,
    z0: np.ndarray | None = None,
) -> QPResult:
    """Projected gradient with Armijo backtracking for z >= 0.

    Starts from max(z_LS, 0) unless `z0` is given, then polishes the result by
    re-solving least squares on the free coordinates when that stays feasible
    and does not raise the objective.
    """
    s = np.sqrt(c)
    A = s[:, None] * W
    b = s * x

    def f(z: np.ndarray) -> float:
        r = A @ z - b
        return float(r @ r)

    z = np.maximum(solve_least_squares(W, c, x), 0.0) if z0 is None else np.maximum(z0, 0.0)
    lipschitz = 2.0 * float(np.linalg.norm(A, 2) ** 2)
    fz = f(z)
    trace = [fz]
    if lipschitz == 0.0:
        return QPResult(z, fz, 0, True, trace)

    converged = False
    it = 0
    for it in range(1, max_iters + 1):  # noqa: B007
        g = 2.0 * (A.T @ (A @ z - b))
        pg = np.where(z > 0, g, np.minimum(g, 0.0))
        if float(np.linalg.norm(pg)) <= tol:
            converged = True
            break
        step = 2.0 / lipschitz
        while True:
            z_new = np.maximum(z - step * g, 0.0)
            f_new = f(z_new)
            if f_new <= fz + _ARMIJO * float(g @ (z_new - z)):
                break
            step *= 0.5
            if step < 1e-30:
                z_new, f_new = z, fz
                break
        if np.array_equal(z_new, z):
            converged = True
            break
        z, fz = z_new, f_new
        trace.append(fz)

    free = z > 0
    if free.any():
        z_free, *_ = np.linalg.lstsq(A[:, free], b, rcond=None)
        if np.all(z_free >= 0):
            candidate = np.zeros_like(z)
            candidate[free] = z_free
            f_cand = f(candidate)
            if f_cand <= fz:
                z, fz = candidate, f_cand
                trace.append(fz)

    if not converged:
        log.debug(f"nonneg QP stopped after {it} iterations (objective {fz:.6g})")
    return QPResult(z, fz, it, converged, trace)


def subspace_opinion(
    factor: SubspaceFactor,
    summaries: tuple[Summary, ...],
    weights: np.ndarray,
    previous_vote: np.ndarray | None = None,
) -> np.ndarray:
    """Opinion vector W z* for the current messages.

    A previous vote is kept unless the new solution is strictly better on the
    opinion objective.
    """
    W = factor.W
    c, x = qp_coefficients(summaries, weights, complex_=np.iscomplexobj(W))
    if factor.domain is HiddenDomain.NONNEG:
        z = solve_nonneg_qp(W, c, x, factor.config.qp_max_iters, factor.config.qp_tolerance).z
    else:
        z = solve_least_squares(W, c, x)
    opinion = W @ z

    if previous_vote is not None:
        f_prev = float(np.sum(c * np.abs(previous_vote - x) ** 2))
        f_new = float(np.sum(c * np.abs(opinion - x) ** 2))
        if not f_new < f_prev:
            return previous_vote
    return opinion


def subspace_confidence(
    opinion: np.ndarray,
    summaries: tuple[Summary, ...],
    active_degrees: np.ndarray,
    lam: float,
    penalty: ConfidencePenalty = ConfidencePenalty.PER_VARIABLE,
) -> float:
    """Match against the messages, minus a penalty for thinly-voted variables.

    For each variable: -lam times the message count times the squared distance
    from the opinion to the message mean, minus one over the number of
    non-abstaining neighbors. The result is the mean over variables.

    The neighbor count is floored at 1.
    """
    n = len(summaries)
    fit = 0.0
    for i, s in enumerate(summaries):
        if isinstance(s, RealSummary):
            fit += lam * s.count * float(abs(opinion[i] - s.x_tilde) ** 2)
    pen = float(np.sum(1.0 / np.maximum(np.asarray(active_degrees, dtype=np.float64), 1.0)))
    if penalty is ConfidencePenalty.UNSCALED:
        return -fit / n - pen
    return -(fit + pen) / n


def subspace_satisfied(opinion: np.ndarray, vote: np.ndarray, alpha: float) -> bool:
    """||opinion - vote||^2 <= alpha (inclusive)."""
    return float(np.sum(np.abs(np.asarray(opinion) - np.asarray(vote)) ** 2)) <= alpha


class SubspaceFactor(FactorPayload):
    """n x p basis W; the factor may only vote vectors W z, z in the hidden domain."""

    kind = PayloadKind.SUBSPACE

    def __init__(
        self,
        W: ArrayLike,
        domain: HiddenDomain = HiddenDomain.NONNEG,
        config: SubspaceConfig | None = None,
    ):
        basis = np.asarray(W)
        if basis.ndim != 2:
            raise StructuralError(f"Subspace basis must be a matrix, got shape {basis.shape}")
        n, p = basis.shape
        if not 0 < p < n:
            raise StructuralError(f"Subspace factor needs 0 < p < n, got n={n}, p={p}")
        if domain is HiddenDomain.COMPLEX:
            basis = basis.astype(np.complex128)
        else:
            if np.iscomplexobj(basis):
                raise StructuralError(f"{domain.value} subspace needs a real basis")
            basis = basis.astype(np.float64)
        if domain is HiddenDomain.NONNEG and np.any(basis < 0):
            raise StructuralError("Nonnegative subspace needs W >= 0")
        basis.setflags(write=False)
        self.W = basis
        self.domain = domain
        self.config = config or SubspaceConfig()

    @property
    def degree(self) -> int:
        return int(self.W.shape[0])

    @property
    def hidden_dim(self) -> int:
        return int(self.W.shape[1])

    @property
    def alpha(self) -> float:
        return self.config.alpha_for(self.degree)

    def __repr__(self) -> str:
        return f"SubspaceFactor(n={self.degree}, p={self.hidden_dim}, domain={self.domain.value})"

    def with_config(self, config: SubspaceConfig) -> SubspaceFactor:
        return SubspaceFactor(self.W, self.domain, config)

    def opinion(self, ctx: OpinionContext) -> Opinion:
        values = subspace_opinion(self, ctx.summaries, ctx.weights, ctx.previous_vote)
        confidence = subspace_confidence(values, ctx.summaries, ctx.active_degrees, self.config.lam, self.config.penalty)
        return Opinion(values, confidence)

    def satisfied(self, opinion: np.ndarray, vote: np.ndarray) -> bool:
        return subspace_satisfied(opinion, vote, self.alpha)

    def is_feasible(self, vote: np.ndarray) -> bool:
        v = np.asarray(vote)
        scale = max(1.0, float(np.linalg.norm(v)))
        if self.domain is HiddenDomain.NONNEG:
            if np.iscomplexobj(v):
                return False
            _, residual = nnls(self.W, v.astype(np.float64))
            return residual <= 1e-8 * scale
        z, *_ = np.linalg.lstsq(self.W, v, rcond=None)
        return float(np.linalg.norm(self.W @ z - v)) <= 1e-8 * scale

    def check_kinds(self, kinds: tuple[VariableKind, ...]) -> None:
        if len(kinds) != self.degree:
            raise NetworkValidationError(f"Subspace has {self.degree} rows but is bound to {len(kinds)} variables")
        want = ComplexKind if self.domain is HiddenDomain.COMPLEX else RealKind
        for j, kind in enumerate(kinds):
            if not isinstance(kind, want):
                raise NetworkValidationError(
                    f"{self.domain.value} subspace column {j} needs {want.__name__}, got {type(kind).__name__}"
                )
