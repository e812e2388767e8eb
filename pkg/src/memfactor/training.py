"""Turn exemplars into factor payloads.

Exemplar matrices are n x m: one column per training sample, rows aligned
with the factor's neighbor list.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from memfactor.factors.base import FactorPayload
from memfactor.factors.subspace import HiddenDomain, SubspaceConfig, SubspaceFactor
from memfactor.factors.table import MemoryTable
from memfactor.graph.kinds import VariableKind
from memfactor.graph.network import Network
from memfactor.log import log
from memfactor.validation import TrainingError, validate_probability

_EPS = 1e-12

Trainer = Literal["table", "nmf", "pca"]


def _as_exemplars(X: ArrayLike) -> np.ndarray:
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise TrainingError(f"Exemplar matrix must be n x m with n, m >= 1, got shape {arr.shape}")
    return arr


def ingest_table(
    exemplars: ArrayLike,
    subsample_prob: float = 1.0,
    seed: int = 0,
    kinds: tuple[VariableKind, ...] | None = None,
) -> MemoryTable:
    """Store exemplar columns as table rows, keeping each with probability `subsample_prob`.

    Raises:
        TrainingError: If no exemplar survives subsampling.
    """
    validate_probability("subsample_prob", subsample_prob)
    X = _as_exemplars(exemplars)
    if subsample_prob < 1.0:
        keep = np.random.default_rng(seed).random(X.shape[1]) < subsample_prob
        X = X[:, keep]
    if X.shape[1] == 0:
        raise TrainingError(
            f"No exemplars kept at subsample_prob={subsample_prob} (seed {seed}); "
            "use a higher probability or a different seed"
        )
    return MemoryTable(X.T, kinds)


@dataclass
class NMFResult:
    W: np.ndarray
    H: np.ndarray
    trace: list[float] = field(default_factory=list)
    """||X - WH||_F^2 / ||X||_F^2 after init and after every iteration."""

    @property
    def relative_residual(self) -> float:
        return float(np.sqrt(self.trace[-1]))


def nmf(
    X: ArrayLike,
    p: int,
    max_iters: int = 500,
    tol: float = 1e-9,
    seed: int = 0,
    restarts: int = 1,
) -> NMFResult:
    """Nonnegative factorization X ~ W H by multiplicative updates.

    Each restart iterates from its own seeded init (seed, seed + 1, ...) until
    the relative objective improvement drops below `tol` or `max_iters` is
    reached. The restart with the lowest final objective wins.

    Raises:
        TrainingError: If X has negative entries, p is not in [1, n) or
            restarts < 1.
    """
    X = _as_exemplars(X).astype(np.float64)
    n, _ = X.shape
    if not 1 <= p < n:
        raise TrainingError(f"NMF needs 1 <= p < n, got p={p}, n={n}")
    if np.any(X < 0):
        raise TrainingError("NMF needs a nonnegative exemplar matrix")
    if restarts < 1:
        raise TrainingError(f"NMF needs restarts >= 1, got {restarts}")

    best: NMFResult | None = None
    for r in range(restarts):
        res = _nmf_once(X, p, max_iters, tol, seed + r)
        if best is None or res.trace[-1] < best.trace[-1]:
            best = res
    assert best is not None
    return best


def _nmf_once(X: np.ndarray, p: int, max_iters: int, tol: float, seed: int) -> NMFResult:
    n, m = X.shape
    rng = np.random.default_rng(seed)
    W = rng.uniform(0.1, 1.0, size=(n, p))
    H = rng.uniform(0.1, 1.0, size=(p, m))
    scale = np.sqrt(max(X.mean(), _EPS) / max((W @ H).mean(), _EPS))
    W *= scale
    H *= scale

    norm = float(np.sum(X**2)) or 1.0

    def objective() -> float:
        return float(np.sum((X - W @ H) ** 2)) / norm

    trace = [objective()]
    for it in range(max_iters):
        H *= (W.T @ X) / (W.T @ W @ H + _EPS)
        W *= (X @ H.T) / (W @ H @ H.T + _EPS)
        trace.append(objective())
        prev, cur = trace[-2], trace[-1]
        if prev > 0 and (prev - cur) / prev < tol:
            log.debug(f"nmf: seed {seed} converged after {it + 1} iterations (residual {cur:.3g})")
            break
    return NMFResult(W, H, trace)


@dataclass
class PCAResult:
    W: np.ndarray
    eigenvalues: np.ndarray
    filled: int = 0
    """Columns taken from the orthogonal complement because rank < p."""


def _power_iteration(
    matvec: Callable[[np.ndarray], np.ndarray],
    v: np.ndarray,
    tol: float,
    max_iters: int,
) -> tuple[np.ndarray, float]:
    v = v / np.linalg.norm(v)
    for _ in range(max_iters):
        u = matvec(v)
        norm = np.linalg.norm(u)
        if norm == 0:
            return v, 0.0
        u = u / norm
        phase = np.vdot(v, u)
        if abs(phase) > 0:
            u = u * (np.conj(phase) / abs(phase))
        if np.linalg.norm(u - v) < tol:
            v = u
            break
        v = u
    return v, float(np.real(np.vdot(v, matvec(v))))


def complex_pca(
    X: ArrayLike,
    p: int,
    tol: float = 1e-10,
    max_iters: int = 20_000,
    seed: int = 0,
) -> PCAResult:
    """Top-p eigenvectors of S = sum_t x_t x_t^H by power iteration with deflation.

    S is applied as X (X^H v) and deflated implicitly, so wide factors never
    materialize an n x n matrix. Real input yields a real basis. If S has
    rank < p, the remaining columns are an orthonormal basis of the
    complement of the ones found.

    Raises:
        TrainingError: If p is not in [1, n).
    """
    X = _as_exemplars(X)
    n = X.shape[0]
    if not 1 <= p < n:
        raise TrainingError(f"PCA needs 1 <= p < n, got p={p}, n={n}")
    dtype = np.complex128 if np.iscomplexobj(X) else np.float64
    X = X.astype(dtype)
    Xh = X.conj().T
    rng = np.random.default_rng(seed)

    columns: list[np.ndarray] = []
    eigenvalues: list[float] = []

    def deflated(v: np.ndarray) -> np.ndarray:
        out = X @ (Xh @ v)
        for lam, w in zip(eigenvalues, columns, strict=True):
            out = out - lam * w * np.vdot(w, v)
        return out

    scale = max(float(np.sum(np.abs(X) ** 2)), _EPS)
    for _ in range(p):
        start = rng.standard_normal(n).astype(dtype)
        if dtype == np.complex128:
            start = start + 1j * rng.standard_normal(n)
        v, lam = _power_iteration(deflated, start, tol, max_iters)
        if lam <= tol * scale:
            break
        columns.append(v)
        eigenvalues.append(lam)

    filled = p - len(columns)
    if filled:
        log.warn(f"complex_pca: rank {len(columns)} < p={p}; filling {filled} columns from the complement")
        found = np.array(columns).T if columns else np.zeros((n, 0), dtype=dtype)
        candidates = rng.standard_normal((n, filled + 1)).astype(dtype)
        candidates -= found @ (found.conj().T @ candidates)
        q, _ = np.linalg.qr(candidates)
        columns.extend(q[:, k] for k in range(filled))
        eigenvalues.extend([0.0] * filled)

    return PCAResult(np.array(columns).T, np.array(eigenvalues), filled)


def pool_columns(blocks: Sequence[ArrayLike]) -> np.ndarray:
    """Stack exemplar blocks (each n x k) side by side.

    Raises:
        TrainingError: If the blocks disagree on n.
    """
    arrays = [_as_exemplars(b) for b in blocks]
    if not arrays:
        raise TrainingError("No exemplar blocks to pool")
    shapes = {a.shape[0] for a in arrays}
    if len(shapes) > 1:
        raise TrainingError(f"Cannot pool exemplars of different factor shapes: {sorted(shapes)}")
    return np.concatenate(arrays, axis=1)


@dataclass(frozen=True)
class TrainerSpec:
    """Which payload to build and with what knobs."""

    trainer: Trainer = "table"
    hidden_p: int = 5
    subsample_prob: float = 1.0
    nmf_max_iters: int = 500
    nmf_tol: float = 1e-9
    nmf_restarts: int = 1
    seed: int = 0
    subspace: SubspaceConfig = field(default_factory=SubspaceConfig)


@dataclass
class TrainingReport:
    """Per-payload diagnostics."""

    key: str
    trainer: Trainer
    n_exemplars: int
    size: int
    """Rows kept (tables) or hidden dimension (subspaces)."""
    residual: float | None = None
    trace: list[float] = field(default_factory=list)


def _hidden_dim(spec: TrainerSpec, n: int, key: str) -> int:
    p = min(spec.hidden_p, n - 1)
    if p < spec.hidden_p:
        log.warn(f"{key or 'payload'}: hidden_p={spec.hidden_p} clamped to {p} for {n} variables")
    return p


def train_payload(
    X: np.ndarray,
    spec: TrainerSpec,
    kinds: tuple[VariableKind, ...] | None = None,
    key: str = "",
) -> tuple[FactorPayload, TrainingReport]:
    """Dispatch one exemplar matrix to the configured trainer."""
    match spec.trainer:
        case "table":
            table = ingest_table(X, spec.subsample_prob, spec.seed, kinds)
            return table, TrainingReport(key, "table", X.shape[1], table.n_rows)
        case "nmf":
            p = _hidden_dim(spec, X.shape[0], key)
            res = nmf(X, p, spec.nmf_max_iters, spec.nmf_tol, spec.seed, spec.nmf_restarts)
            factor = SubspaceFactor(res.W, HiddenDomain.NONNEG, spec.subspace)
            return factor, TrainingReport(key, "nmf", X.shape[1], p, res.relative_residual, res.trace)
        case "pca":
            p = _hidden_dim(spec, X.shape[0], key)
            pca = complex_pca(X, p, seed=spec.seed)
            domain = HiddenDomain.COMPLEX if np.iscomplexobj(pca.W) else HiddenDomain.REALS
            return SubspaceFactor(pca.W, domain, spec.subspace), TrainingReport(key, "pca", X.shape[1], p)
    raise TrainingError(f"Unknown trainer '{spec.trainer}'")


def factor_columns(net: Network, factor_id: int, samples: np.ndarray) -> np.ndarray:
    """Exemplar matrix of one factor: column t = sample t restricted to N(a).

    Args:
        samples: m x N array of full variable assignments.
    """
    return np.asarray(samples)[:, list(net.neighbors(factor_id))].T


def train_network(
    net: Network,
    samples: np.ndarray,
    spec: TrainerSpec,
) -> tuple[dict[str, FactorPayload], list[TrainingReport]]:
    """Train one payload per payload key.

    Factors that share a key pool their columns from every position, so a
    shared payload is trained once and referenced by all of them.

    Args:
        samples: m x N array; row t assigns every variable of the network.
    """
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[1] != net.n_variables:
        raise TrainingError(f"Training samples must be m x {net.n_variables}, got shape {samples.shape}")
    payloads: dict[str, FactorPayload] = {}
    reports: list[TrainingReport] = []
    for key in net.payload_keys():
        members = net.factors_with_key(key)
        X = pool_columns([factor_columns(net, f.id, samples) for f in members])
        payload, report = train_payload(X, spec, net.kinds_of(members[0].id), key)
        payloads[key] = payload
        reports.append(report)
        log.debug(f"trained {key}: {report.trainer} from {report.n_exemplars} exemplars (size {report.size})")
    return payloads, reports


def train_shared(
    blocks: Sequence[ArrayLike], spec: TrainerSpec, key: str = "shared"
) -> tuple[FactorPayload, TrainingReport]:
    """Pool exemplars from every time position and train a single payload."""
    return train_payload(pool_columns(blocks), spec, key=key)


def count_payloads(payloads: Mapping[str, FactorPayload]) -> int:
    """Number of distinct payload objects (shared payloads count once)."""
    return len({id(p) for p in payloads.values()})
