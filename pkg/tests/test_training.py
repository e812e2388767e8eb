"""Tests for payload training."""

import numpy as np
import pytest

from memfactor.engine import run
from memfactor.factors import HiddenDomain, MemoryTable, SubspaceFactor
from memfactor.graph import attach_evidence
from memfactor.layouts import build_spectrogram_layout
from memfactor.training import (
    TrainerSpec,
    complex_pca,
    count_payloads,
    ingest_table,
    nmf,
    pool_columns,
    train_network,
    train_payload,
    train_shared,
)
from memfactor.validation import TrainingError


class TestIngestTable:
    """Tests for ingest_table()."""

    def test_keeps_everything(self, rng: np.random.Generator) -> None:
        table = ingest_table(rng.uniform(size=(3, 5)))
        assert table.n_rows == 5
        assert table.degree == 3

    def test_subsample_rate(self, rng: np.random.Generator) -> None:
        table = ingest_table(rng.uniform(size=(2, 1000)), subsample_prob=0.3, seed=5)
        sigma = np.sqrt(1000 * 0.3 * 0.7)
        assert abs(table.n_rows - 300) <= 3 * sigma

    def test_deterministic(self, rng: np.random.Generator) -> None:
        X = rng.uniform(size=(4, 50))
        a = ingest_table(X, 0.5, seed=9)
        b = ingest_table(X, 0.5, seed=9)
        np.testing.assert_array_equal(a.rows, b.rows)

    def test_duplicates_kept(self) -> None:
        assert ingest_table(np.ones((2, 4))).n_rows == 4

    def test_nothing_kept(self) -> None:
        with pytest.raises(TrainingError, match="higher probability"):
            ingest_table(np.ones((2, 4)), subsample_prob=0.0)


class TestNMF:
    """Tests for nmf()."""

    def test_exact_rank_one(self) -> None:
        X = np.outer([1.0, 2.0, 3.0, 4.0], [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
        result = nmf(X, 1, max_iters=500)
        assert result.relative_residual <= 1e-3
        assert np.all(result.W >= 0) and np.all(result.H >= 0)

    def test_objective_non_increasing(self, rng: np.random.Generator) -> None:
        result = nmf(rng.uniform(size=(8, 40)), 3, max_iters=200, tol=0.0)
        trace = np.array(result.trace)
        assert np.all(np.diff(trace) <= 1e-10 * trace[:-1])

    @pytest.mark.parametrize(
        "n,p,seed",
        [(n, p, seed) for n in (6, 12, 20) for p in (1, 2, 3) for seed in range(3)],
        ids=lambda v: str(v),
    )
    def test_exact_rank_recovered(self, n: int, p: int, seed: int) -> None:
        rng = np.random.default_rng(seed)
        W = rng.uniform(size=(n, p)) ** 2 + 0.05
        H = rng.uniform(size=(p, 40)) ** 2 + 0.05
        result = nmf(W @ H, p, max_iters=500, restarts=3)
        assert len(result.trace) <= 501
        assert result.relative_residual <= 1e-3

    def test_restarts_keep_best(self, rng: np.random.Generator) -> None:
        X = rng.uniform(size=(8, 30))
        single = [nmf(X, 2, max_iters=50, seed=s).trace[-1] for s in range(4)]
        best = nmf(X, 2, max_iters=50, seed=0, restarts=4)
        assert best.trace[-1] == min(single)

    def test_restarts_bounds(self) -> None:
        with pytest.raises(TrainingError, match="restarts"):
            nmf(np.ones((4, 6)), 1, restarts=0)

    @pytest.mark.parametrize("p", [0, 4], ids=["zero", "equals-n"])
    def test_hidden_dim_bounds(self, p: int) -> None:
        with pytest.raises(TrainingError, match="1 <= p < n"):
            nmf(np.ones((4, 6)), p)

    def test_negative_input(self) -> None:
        with pytest.raises(TrainingError, match="nonnegative"):
            nmf(-np.ones((4, 6)), 1)


class TestComplexPCA:
    """Tests for complex_pca()."""

    def test_rank_one(self) -> None:
        u = np.array([1.0 + 1j, 2.0, -1j, 0.5])
        X = np.tile(u[:, None], (1, 7))
        W = complex_pca(X, 1).W
        assert abs(np.vdot(W[:, 0], u / np.linalg.norm(u))) == pytest.approx(1.0, abs=1e-8)

    def test_matches_dense_eigensolve(self, rng: np.random.Generator) -> None:
        X = rng.normal(size=(5, 40)) * np.array([3.0, 2.0, 1.5, 1.0, 0.5])[:, None]
        result = complex_pca(X, 2)
        evals, evecs = np.linalg.eigh(X @ X.T)
        order = np.argsort(evals)[::-1]
        np.testing.assert_allclose(result.eigenvalues, evals[order[:2]], rtol=1e-6)
        for k in range(2):
            assert abs(result.W[:, k] @ evecs[:, order[k]]) == pytest.approx(1.0, abs=1e-6)
        assert not np.iscomplexobj(result.W)

    def test_orthonormal_and_ordered(self, rng: np.random.Generator) -> None:
        X = rng.normal(size=(6, 40)) + 1j * rng.normal(size=(6, 40))
        X *= np.array([4.0, 3.0, 2.0, 1.0, 0.5, 0.25])[:, None]
        result = complex_pca(X, 3)
        np.testing.assert_allclose(result.W.conj().T @ result.W, np.eye(3), atol=1e-8)
        assert np.all(np.diff(result.eigenvalues) <= 1e-9 * result.eigenvalues[0])

    def test_rank_deficient_fills_complement(self) -> None:
        X = np.tile(np.array([[1.0], [0.0], [2.0], [0.0], [1.0]]), (1, 4))
        result = complex_pca(X, 3)
        assert result.filled == 2
        np.testing.assert_allclose(result.W.conj().T @ result.W, np.eye(3), atol=1e-8)

    def test_hidden_dim_bounds(self) -> None:
        with pytest.raises(TrainingError):
            complex_pca(np.ones((3, 4)), 3)


class TestTrainPayload:
    @pytest.mark.parametrize(
        "trainer,expected",
        [("table", MemoryTable), ("nmf", SubspaceFactor), ("pca", SubspaceFactor)],
        ids=["table", "nmf", "pca"],
    )
    def test_dispatch(self, rng: np.random.Generator, trainer: str, expected: type) -> None:
        X = rng.uniform(size=(6, 30))
        payload, report = train_payload(X, TrainerSpec(trainer=trainer, hidden_p=2), key="k")  # type: ignore[arg-type]
        assert isinstance(payload, expected)
        assert report.key == "k"
        assert report.n_exemplars == 30

    def test_nmf_is_nonneg_domain(self, rng: np.random.Generator) -> None:
        payload, report = train_payload(rng.uniform(size=(6, 30)), TrainerSpec(trainer="nmf", hidden_p=3))
        assert isinstance(payload, SubspaceFactor)
        assert payload.domain is HiddenDomain.NONNEG
        assert payload.hidden_dim == report.size == 3
        assert report.residual is not None

    def test_hidden_dim_capped_below_degree(self, rng: np.random.Generator) -> None:
        payload, _ = train_payload(rng.uniform(size=(3, 10)), TrainerSpec(trainer="nmf", hidden_p=5))
        assert isinstance(payload, SubspaceFactor)
        assert payload.hidden_dim == 2

    def test_hidden_dim_clamp_is_logged(self, rng: np.random.Generator, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level("WARNING", logger="memfactor"):
            train_payload(rng.uniform(size=(3, 10)), TrainerSpec(trainer="pca", hidden_p=5), key="patch_0")
        assert "patch_0: hidden_p=5 clamped to 2" in caplog.text

    def test_no_warning_within_degree(self, rng: np.random.Generator, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level("WARNING", logger="memfactor"):
            train_payload(rng.uniform(size=(6, 10)), TrainerSpec(trainer="nmf", hidden_p=2))
        assert "clamped" not in caplog.text


class TestSharedTraining:
    """Shared payloads pool every time position."""

    def test_pool_counts(self) -> None:
        layout = build_spectrogram_layout(n_bins=3, n_frames=11, factor_width=2, shared=True)
        assert layout.network.n_factors == 10
        samples = np.arange(2 * 33, dtype=np.complex128).reshape(2, 33)
        payloads, reports = train_network(layout.network, samples, TrainerSpec())
        assert list(payloads) == ["shared:w2"]
        assert reports[0].n_exemplars == 20
        bound = layout.network.bind(payloads)
        assert count_payloads({str(f.id): f.payload for f in bound.factors}) == 1

    def test_pool_shape_mismatch(self) -> None:
        with pytest.raises(TrainingError, match="different factor shapes"):
            pool_columns([np.ones((3, 2)), np.ones((4, 2))])

    def test_train_shared(self) -> None:
        payload, report = train_shared([np.ones((4, 2)), np.zeros((4, 3))], TrainerSpec(), key="shared:w2")
        assert isinstance(payload, MemoryTable)
        assert payload.n_rows == 5
        assert report.key == "shared:w2"

    def test_per_position_beats_shared_on_position_dependent_signal(self) -> None:
        a, b, c = (1.0, 1.0), (2.0, 0.0), (0.0, 2.0)
        frames = [a if t % 2 == 0 else (b if t % 4 == 1 else c) for t in range(12)]
        truth = np.array(frames, dtype=np.complex128).T  # 2 bins x 12 frames
        gap = 7

        errors = {}
        for shared in (True, False):
            layout = build_spectrogram_layout(n_bins=2, n_frames=12, factor_width=2, shared=shared)
            sample = layout.to_vector(truth)[None, :]
            payloads, _ = train_network(layout.network, sample, TrainerSpec())
            bound = layout.network.bind(payloads)
            observed = {i: complex(v) for i, v in enumerate(sample[0]) if i not in (layout.var(0, gap), layout.var(1, gap))}
            result = run(attach_evidence(bound, observed, 1.0))
            recon = layout.to_matrix(result.assignment.filled())
            errors[shared] = float(np.mean(np.abs(recon[:, gap] - truth[:, gap]) ** 2))

        assert errors[False] == pytest.approx(0.0)
        assert errors[False] < errors[True]
