"""Tests for the memory-table payload."""

import math

import numpy as np
import pytest

from memfactor.factors import MemoryTable, OpinionContext
from memfactor.graph import IntegerKind, LabelKind, RealKind
from memfactor.kernels import EMPTY, RealSummary, brute_force_inner_min, summarize
from memfactor.validation import NetworkValidationError, StructuralError


def context(kinds, summaries, weights=None, previous=None) -> OpinionContext:
    n = len(kinds)
    return OpinionContext(
        kinds=tuple(kinds),
        summaries=tuple(summaries),
        weights=np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64),
        previous_vote=None if previous is None else np.asarray(previous, dtype=np.float64),
        active_degrees=np.ones(n, dtype=np.int64),
    )


class TestMemoryTableOpinion:
    """Tests for MemoryTable.opinion()."""

    def test_hand_evaluated_confidence(self) -> None:
        table = MemoryTable([[0.0, 0.0], [1.0, 1.0]])
        s = RealSummary(1.0, 1.0, 1)
        op = table.opinion(context([RealKind()] * 2, [s, s]))
        np.testing.assert_array_equal(op.values, [1.0, 1.0])
        assert op.confidence == pytest.approx(1.0)

    def test_no_information_means_zero_confidence(self) -> None:
        table = MemoryTable([[0.0], [1.0], [2.0]])
        op = table.opinion(context([RealKind()], [EMPTY]))
        assert op.confidence == 0.0

    def test_previous_vote_kept_on_tie(self) -> None:
        table = MemoryTable([[0.0], [1.0], [2.0]])
        op = table.opinion(context([RealKind()], [EMPTY], previous=[2.0]))
        np.testing.assert_array_equal(op.values, [2.0])

    def test_previous_vote_replaced_when_worse(self) -> None:
        table = MemoryTable([[0.0], [1.0]])
        op = table.opinion(context([RealKind()], [RealSummary(1.0, 5.0, 1)], previous=[0.0]))
        np.testing.assert_array_equal(op.values, [1.0])
        assert table.satisfied(op.values, np.array([0.0])) is False

    def test_duplicates_do_not_inflate_confidence(self) -> None:
        table = MemoryTable([[1.0], [1.0], [3.0]])
        op = table.opinion(context([RealKind()], [RealSummary(1.0, 1.0, 1)]))
        np.testing.assert_array_equal(op.values, [1.0])
        # gap to the row 3.0: 1 * 1 / 2 * 4
        assert op.confidence == pytest.approx(2.0)

    def test_identical_rows_have_infinite_confidence(self) -> None:
        table = MemoryTable([[1.0, 2.0], [1.0, 2.0]])
        op = table.opinion(context([RealKind()] * 2, [RealSummary(0.0, 1.0, 1), EMPTY]))
        assert math.isinf(op.confidence)

    def test_single_row_is_fixed(self) -> None:
        table = MemoryTable([[0.5]])
        op = table.opinion(context([RealKind()], [RealSummary(9.0, 1.0, 1)]))
        np.testing.assert_array_equal(op.values, [0.5])
        assert math.isinf(op.confidence)

    def test_strong_evidence_picks_agreeing_memory(self) -> None:
        table = MemoryTable([[0.0, 0.0], [1.0, 0.0]])
        ctx = context([RealKind()] * 2, [RealSummary(1.0, 100.0, 1), RealSummary(0.0, 1.0, 1)])
        op = table.opinion(ctx)
        np.testing.assert_array_equal(op.values, [1.0, 0.0])

    def test_confidence_nonnegative(self, rng: np.random.Generator) -> None:
        for _ in range(50):
            rows = rng.integers(0, 4, size=(6, 3)).astype(np.float64)
            table = MemoryTable(rows)
            summaries = [RealSummary(float(x), float(w), 1) for x, w in zip(rng.uniform(0, 3, 3), rng.uniform(0.1, 2, 3), strict=True)]
            op = table.opinion(context([RealKind()] * 3, summaries))
            assert op.confidence >= 0.0


class TestMixedFactor:
    """Row costs of a mixed-kind table add up per variable."""

    def test_row_costs_match_per_variable_oracle(self, rng: np.random.Generator) -> None:
        kinds = (RealKind(), IntegerKind(0, 9), LabelKind(4))
        rows = np.array([[0.5, 3, 0], [1.5, 7, 2], [0.0, 4, 2], [2.0, 0, 1]], dtype=np.float64)
        table = MemoryTable(rows, kinds)
        externals = [
            [(1.0, 1.0), (0.25, 2.0)],
            [(5, 1.0), (6, 1.0), (2, 1.0)],
            [(2, 1.0), (2, 1.0), (1, 1.0)],
        ]
        weights = np.array([1.5, 1.0, 1.0])
        summaries = [summarize(k, ext) for k, ext in zip(kinds, externals, strict=True)]
        costs = table.row_costs(context(kinds, summaries, weights))

        oracle = np.array(
            [
                sum(
                    brute_force_inner_min(kinds[j], row[j].item(), float(weights[j]), externals[j])
                    for j in range(3)
                )
                for row in rows
            ]
        )
        np.testing.assert_allclose(costs - costs[0], oracle - oracle[0], atol=1e-12)
        assert table.opinion(context(kinds, summaries, weights)).values.tolist() == rows[int(np.argmin(oracle))].tolist()


class TestMemoryTableStructure:
    def test_vote_row(self) -> None:
        table = MemoryTable([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(table.vote_row(1), [3.0, 4.0])
        with pytest.raises(StructuralError, match="out of range"):
            table.vote_row(2)

    def test_empty_table_rejected(self) -> None:
        with pytest.raises(StructuralError):
            MemoryTable(np.zeros((0, 3)))

    def test_feasibility(self) -> None:
        table = MemoryTable([[1.0, 2.0], [3.0, 4.0]])
        assert table.is_feasible(np.array([3.0, 4.0]))
        assert not table.is_feasible(np.array([3.0, 2.0]))

    def test_kinds_checked(self) -> None:
        with pytest.raises(NetworkValidationError, match="outside"):
            MemoryTable([[0.0, 5.0]], (RealKind(), LabelKind(3)))

    def test_satisfied_is_exact_equality(self) -> None:
        table = MemoryTable([[1.0], [2.0]])
        assert table.satisfied(np.array([1.0]), np.array([1.0]))
        assert not table.satisfied(np.array([1.0]), np.array([1.0 + 1e-12]))
