"""Tests for the factor network, costs and optimal assignment."""

import itertools

import numpy as np
import pytest

from memfactor.factors import MemoryTable
from memfactor.graph import (
    Assignment,
    CostTuple,
    IntegerKind,
    LabelKind,
    Network,
    NetworkBuilder,
    RealKind,
    active_cost,
    attach_evidence,
    cost_tuple,
    global_cost,
    optimal_assignment,
)
from memfactor.graph.kinds import kind_from_dict, kind_to_dict
from memfactor.validation import InfeasibleVoteError, NetworkValidationError, StructuralError, ValidationError


def single_variable(value: float, weight: float) -> Network:
    b = NetworkBuilder()
    v = b.add_variable(RealKind())
    b.add_evidence(v, value, weight)
    return b.build()


class TestGlobalCost:
    """Tests for global_cost()."""

    def test_exact_match(self) -> None:
        net = single_variable(3.0, 2.0)
        x = Assignment.from_mapping(1, {0: 3.0})
        assert global_cost(net, {0: np.array([3.0])}, x) == 0.0

    def test_one_quadratic_term(self) -> None:
        net = single_variable(3.0, 2.0)
        x = Assignment.from_mapping(1, {0: 5.0})
        assert global_cost(net, {0: np.array([3.0])}, x) == pytest.approx(8.0)

    def test_matches_term_by_term_sum(self, toy_network: Network) -> None:
        votes = {0: np.array([1.0, 2.0]), 1: np.array([0.0, 2.0])}
        x = Assignment.from_mapping(3, {0: 1.5, 1: 1.0, 2: 2.5})
        # sum_a sum_i w(i, a) (x_i - v(i, a))^2
        oracle = 1.0 * (1.5 - 1.0) ** 2 + 2.0 * (1.0 - 2.0) ** 2 + 1.0 * (1.0 - 0.0) ** 2 + 0.5 * (2.5 - 2.0) ** 2
        assert global_cost(toy_network, votes, x) == pytest.approx(oracle)
        assert active_cost(toy_network, votes, x, frozenset()) == pytest.approx(oracle)

    def test_infeasible_vote(self, toy_network: Network) -> None:
        votes = {0: np.array([1.0, 9.0]), 1: np.array([0.0, 2.0])}
        x = Assignment.from_mapping(3, {0: 1.0, 1: 9.0, 2: 2.0})
        with pytest.raises(InfeasibleVoteError) as exc:
            global_cost(toy_network, votes, x)
        assert exc.value.factor_id == 0

    def test_missing_vote(self, toy_network: Network) -> None:
        x = Assignment.from_mapping(3, {0: 1.0, 1: 2.0, 2: 2.0})
        with pytest.raises(ValidationError, match="no vote"):
            global_cost(toy_network, {0: np.array([1.0, 2.0])}, x)


class TestActiveCost:
    """Tests for active_cost()."""

    def test_all_abstaining(self, toy_network: Network) -> None:
        x = Assignment.from_mapping(3, {})
        assert active_cost(toy_network, {}, x, {0, 1}) == 0.0

    def test_partial_sum(self, toy_network: Network) -> None:
        votes = {1: np.array([4.0, 1.0])}
        x = Assignment.from_mapping(3, {1: 3.0, 2: 2.0})
        assert active_cost(toy_network, votes, x, {0}) == pytest.approx(1.0 * 1.0 + 0.5 * 1.0)

    def test_unknown_in_scope(self, toy_network: Network) -> None:
        votes = {1: np.array([4.0, 1.0])}
        x = Assignment.from_mapping(3, {1: 3.0})
        with pytest.raises(ValidationError, match="Unknown"):
            active_cost(toy_network, votes, x, {0})

    def test_removing_a_factor_never_increases_cost(self, toy_network: Network) -> None:
        votes = {0: np.array([3.0, 0.0]), 1: np.array([4.0, 1.0])}
        x = Assignment.from_mapping(3, {0: 2.0, 1: 2.0, 2: 2.0})
        full = active_cost(toy_network, votes, x, frozenset())
        assert active_cost(toy_network, votes, x, {0}) <= full
        assert active_cost(toy_network, votes, x, {1}) <= full


class TestOptimalAssignment:
    """Tests for optimal_assignment()."""

    @staticmethod
    def star(kind, values) -> tuple[Network, dict[int, np.ndarray]]:
        b = NetworkBuilder()
        v = b.add_variable(kind)
        for value in values:
            b.add_factor([v], payload=MemoryTable([[value]]))
        return b.build(), {a: np.array([float(value)]) for a, value in enumerate(values)}

    @pytest.mark.parametrize(
        "kind,values,expected",
        [
            (RealKind(), [2.0, 4.0], 3.0),
            (IntegerKind(), [1, 2, 3, 6], 2),
            (LabelKind(3), [0, 0, 1], 0),
        ],
        ids=["real-mean", "integer-median", "label-mode"],
    )
    def test_kernel_minimizers(self, kind, values, expected) -> None:
        net, votes = self.star(kind, values)
        x = optimal_assignment(net, votes, frozenset())
        assert x[0] == pytest.approx(expected)

    def test_unvoted_variables_unknown(self, chain_network: Network) -> None:
        x = optimal_assignment(chain_network, {0: np.array([1.0])}, {1, 2})
        assert x.output_set == [0]
        assert x[1] is None
        np.testing.assert_array_equal(x.filled(-1.0), [1.0, -1.0, -1.0])

    def test_beats_exhaustive_search(self) -> None:
        b = NetworkBuilder()
        v = b.add_variables(IntegerKind(0, 4), 2)
        b.add_factor(v, payload=MemoryTable([[0, 4], [1, 1]]))
        b.add_factor(v, payload=MemoryTable([[3, 2], [4, 4]]))
        b.add_factor([v[0]], payload=MemoryTable([[2], [0]]))
        net = b.build()
        votes = {0: np.array([0.0, 4.0]), 1: np.array([3.0, 2.0]), 2: np.array([2.0])}
        x = optimal_assignment(net, votes, frozenset())
        best = active_cost(net, votes, x, frozenset())
        for a, c in itertools.product(range(5), repeat=2):
            other = Assignment.from_mapping(2, {0: a, 1: c})
            assert best <= active_cost(net, votes, other, frozenset())

    def test_real_perturbation(self, toy_network: Network) -> None:
        votes = {0: np.array([3.0, 0.0]), 1: np.array([4.0, 1.0])}
        x = optimal_assignment(toy_network, votes, frozenset())
        best = active_cost(toy_network, votes, x, frozenset())
        for i in range(3):
            for eps in (-1e-3, 1e-3):
                shifted = x.values.copy()
                shifted[i] += eps
                assert active_cost(toy_network, votes, Assignment(shifted, x.known), frozenset()) > best


class TestCostTuple:
    def test_lexicographic_order(self) -> None:
        assert CostTuple(0, 100.0) < CostTuple(1, 0.0)
        assert CostTuple(1, 1.0) < CostTuple(1, 2.0)
        assert sorted([CostTuple(2, 0.0), CostTuple(0, 5.0), CostTuple(0, 1.0)])[0] == CostTuple(0, 1.0)

    def test_cost_tuple_of_votes(self, chain_network: Network) -> None:
        t = cost_tuple(chain_network, {0: np.array([1.0])}, {1, 2})
        assert t == CostTuple(2, 0.0)


class TestNetworkValidation:
    """Build-time structural checks."""

    def test_unequal_integer_weights(self) -> None:
        b = NetworkBuilder()
        v = b.add_variable(IntegerKind())
        b.add_factor([v], weights=1.0, payload=MemoryTable([[1.0]]))
        b.add_factor([v], weights=2.0, payload=MemoryTable([[2.0]]))
        with pytest.raises(NetworkValidationError, match="unequal edge weights"):
            b.build()

    def test_unequal_real_weights_allowed(self) -> None:
        b = NetworkBuilder()
        v = b.add_variable(RealKind())
        b.add_factor([v], weights=1.0, payload=MemoryTable([[1.0]]))
        b.add_factor([v], weights=2.0, payload=MemoryTable([[2.0]]))
        assert b.build().n_edges == 2

    @pytest.mark.parametrize(
        "neighbors,weights,match",
        [
            ([0, 0], 1.0, "twice"),
            ([5], 1.0, "unknown variable"),
            ([0], -1.0, "invalid weight"),
            ([], 1.0, "no neighbors"),
        ],
        ids=["duplicate", "unknown", "negative", "empty"],
    )
    def test_bad_factor(self, neighbors, weights, match) -> None:
        b = NetworkBuilder()
        b.add_variables(RealKind(), 2)
        b.add_factor(neighbors, weights=weights)
        with pytest.raises(NetworkValidationError, match=match):
            b.build()

    def test_payload_degree_mismatch(self) -> None:
        b = NetworkBuilder()
        v = b.add_variables(RealKind(), 2)
        b.add_factor(v, payload=MemoryTable([[1.0, 2.0, 3.0]]))
        with pytest.raises(NetworkValidationError, match="degree"):
            b.build()

    def test_bind_missing_payload(self) -> None:
        b = NetworkBuilder()
        v = b.add_variables(RealKind(), 2)
        b.add_factor(v, payload_key="patch")
        net = b.build()
        with pytest.raises(StructuralError, match="patch"):
            net.bind({})
        assert net.bind({}, partial=True).factors[0].payload is None
        bound = net.bind({"patch": MemoryTable([[1.0, 2.0]])})
        assert bound.factors[0].payload is not None

    def test_attach_evidence_keeps_ids(self, toy_network: Network) -> None:
        net = attach_evidence(toy_network, {2: 1.0, 0: 3.0}, weight=5.0)
        assert net.n_factors == 4
        assert net.evidence_ids == [2, 3]
        assert net.factors[2].neighbors == (0,)
        assert net.factors[3].weights == (5.0,)
        assert net.var_neighbors(0) == (0, 2)

    def test_kind_documents(self) -> None:
        for kind in (RealKind(nonneg=False, upper=1.0), IntegerKind(0, 255), LabelKind(10)):
            assert kind_from_dict(kind_to_dict(kind)) == kind
