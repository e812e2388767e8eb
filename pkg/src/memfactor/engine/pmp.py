"""Proactive message passing.

Each iteration:
  1. recompute opinions for the reacting factors (in parallel)
  2. update the dissatisfied set and confidences
  3. let the most confident dissatisfied factor(s) vote
  4. voters leave the abstaining and dissatisfied sets; factors sharing a
     variable with a voter react next

Serial steps never increase the cost tuple (abstain count, active cost). Simultaneous steps
may; with rollback on, such a step is undone and replayed serially.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from memfactor.engine.state import RunResult, RunStatus, Schedule, ScheduleMode, VoteState
from memfactor.engine.trace import TraceRecorder, TraceRow
from memfactor.factors.base import OpinionContext
from memfactor.factors.table import MemoryTable
from memfactor.graph.costs import CostTuple, cost_tuple, optimal_assignment
from memfactor.graph.network import Network
from memfactor.kernels import summarize
from memfactor.log import log
from memfactor.validation import StructuralError, ValidationError


@dataclass(frozen=True)
class OpinionResult:
    opinion: np.ndarray
    confidence: float
    satisfied: bool


class PMPEngine:
    """Runs PMP over one network.

    Usage:
        engine = PMPEngine(net, Schedule.simultaneous(0.1), workers=4)
        result = engine.run()
        image = result.assignment.filled()

    Opinion computations within a step are independent and may run on
    `workers` threads; results are merged in ascending factor id, so the
    outcome does not depend on the worker count.
    """

    def __init__(
        self,
        net: Network,
        schedule: Schedule | None = None,
        workers: int = 1,
        trace: TraceRecorder | None = None,
    ):
        self.net = net
        self.schedule = schedule or Schedule()
        self.workers = max(1, workers)
        self.trace = trace
        self.max_iterations = self.schedule.max_iterations or 10 * net.n_factors
        self._rng = np.random.default_rng(self.schedule.seed)
        self._kinds = [net.kinds_of(a) for a in range(net.n_factors)]
        self._weights = [np.asarray(f.weights, dtype=np.float64) for f in net.factors]
        self._track_cost = (
            self.schedule.track_cost
            or trace is not None
            or (self.schedule.mode is ScheduleMode.SIMULTANEOUS and self.schedule.rollback)
        )
        self._executor: ThreadPoolExecutor | None = None

    # --- Set bookkeeping ---

    def _reacting_from(self, changing: Iterable[int]) -> set[int]:
        """Other factors sharing a variable with any changing factor."""
        reacting: set[int] = set()
        for a in changing:
            for i in self.net.neighbors(a):
                reacting.update(e.factor for e in self.net.incidence(i) if e.factor != a)
        return reacting

    def _naive_targets(self, state: VoteState) -> set[int]:
        """Every factor sharing a variable with some other non-abstaining factor."""
        targets: set[int] = set()
        for i in range(self.net.n_variables):
            edges = self.net.incidence(i)
            voters = [e.factor for e in edges if e.factor in state.votes]
            if not voters:
                continue
            for e in edges:
                if any(v != e.factor for v in voters):
                    targets.add(e.factor)
        return targets

    def _cost(self, state: VoteState) -> CostTuple:
        return cost_tuple(self.net, state.votes, state.abstaining)

    # --- Operations ---

    def init(
        self,
        initial_votes: Mapping[int, ArrayLike] | None = None,
        seed_factors: Iterable[int] | None = None,
    ) -> VoteState:
        """Evidence factors vote their observations; everything else abstains.

        Args:
            initial_votes: Votes to start from (e.g. the final votes of an
                earlier run). Those factors join the first vote-changing set.
            seed_factors: Factors that cast their message-free opinion at
                start, for networks without evidence.

        Raises:
            ValidationError: If nothing would vote first.
        """
        net = self.net
        votes: dict[int, np.ndarray] = {}
        for a in net.evidence_ids:
            payload = net.factors[a].payload
            assert isinstance(payload, MemoryTable)
            votes[a] = payload.rows[0]
        changing = set(votes)

        for a, vote in (initial_votes or {}).items():
            fac = net.factors[a]
            arr = np.asarray(vote, dtype=net.vote_dtype(a))
            if arr.shape != (fac.degree,):
                raise ValidationError(f"Initial vote for factor {a} has shape {arr.shape}, expected ({fac.degree},)")
            votes[a] = arr
            changing.add(a)

        state = VoteState(
            votes=votes,
            opinions={},
            abstaining=set(range(net.n_factors)) - set(votes),
            changing=changing,
            reacting=set(),
            dissatisfied=set(),
        )

        for a in sorted(set(seed_factors or ())):
            result = self.compute_opinion(state, a)
            state.votes[a] = result.opinion
            state.abstaining.discard(a)
            state.changing.add(a)

        if not state.changing:
            raise ValidationError("Network has no evidence factors; pass seed_factors or initial_votes")

        state.reacting = self._reacting_from(state.changing)
        if self._track_cost:
            state.cost = self._cost(state)
            state.cost_history.append(state.cost)
        log.debug(f"init: changing={len(state.changing)} abstaining={len(state.abstaining)} reacting={len(state.reacting)}")
        return state

    def compute_opinion(self, state: VoteState, a: int) -> OpinionResult:
        """Opinion, confidence and satisfaction of factor `a` under the current votes.

        Raises:
            StructuralError: If the factor has no payload bound.
        """
        fac = self.net.factors[a]
        payload = fac.payload
        if payload is None:
            raise StructuralError(f"Factor {a} (key '{fac.payload_key}') has no payload bound")
        previous = state.votes.get(a)

        opinion = payload.fixed_opinion() if isinstance(payload, MemoryTable) else None
        if opinion is None:
            summaries = []
            active = np.zeros(fac.degree, dtype=np.int64)
            for j, i in enumerate(fac.neighbors):
                external = []
                n_active = 0
                for e in self.net.incidence(i):
                    vote = state.votes.get(e.factor)
                    if vote is None:
                        continue
                    n_active += 1
                    if e.factor != a:
                        external.append((vote[e.column].item(), e.weight))
                active[j] = n_active
                summaries.append(summarize(self._kinds[a][j], external))
            ctx = OpinionContext(self._kinds[a], tuple(summaries), self._weights[a], previous, active)
            opinion = payload.opinion(ctx)

        satisfied = previous is not None and payload.satisfied(opinion.values, previous)
        return OpinionResult(opinion.values, opinion.confidence, satisfied)

    def _compute_all(self, state: VoteState, targets: list[int]) -> list[OpinionResult]:
        if self.workers == 1 or len(targets) < 2:
            return [self.compute_opinion(state, a) for a in targets]
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.workers, thread_name_prefix="mfn-opinion")
        return list(self._executor.map(lambda a: self.compute_opinion(state, a), targets))

    def _select(self, state: VoteState, count: int) -> list[int]:
        candidates = sorted(state.dissatisfied)
        confidences = np.array([state.confidence[a] for a in candidates], dtype=np.float64)
        if count == 1:
            ties = np.flatnonzero(confidences == confidences.max())
            pick = ties[0] if ties.size == 1 else ties[int(self._rng.integers(ties.size))]
            return [candidates[int(pick)]]
        tie_break = self._rng.permutation(len(candidates))
        order = np.lexsort((tie_break, -confidences))
        return sorted(candidates[int(k)] for k in order[:count])

    def _cast(self, state: VoteState, chosen: list[int]) -> None:
        for a in chosen:
            state.votes[a] = state.opinions[a]
            state.abstaining.discard(a)
            state.dissatisfied.discard(a)
        state.stats.votes_cast += len(chosen)

    def step(self, state: VoteState) -> VoteState:
        """One PMP iteration; mutates and returns `state`."""
        state.iteration += 1
        state.stats.iterations += 1
        targets = sorted(state.reacting if self.schedule.track_reacting else self._naive_targets(state))

        for a, result in zip(targets, self._compute_all(state, targets), strict=True):
            state.opinions[a] = result.opinion
            state.confidence[a] = result.confidence
            if result.satisfied:
                state.dissatisfied.discard(a)
            else:
                state.dissatisfied.add(a)
        state.stats.opinion_updates += len(targets)

        if not state.dissatisfied:
            state.changing = set()
            state.reacting = set()
            self._record(state, 0, 0)
            return state

        simultaneous = self.schedule.mode is ScheduleMode.SIMULTANEOUS
        chosen = self._select(state, self.schedule.select_count(len(state.dissatisfied)))
        if simultaneous:
            state.stats.simultaneous_votes += len(chosen)

        before = state.cost
        undo = {a: state.votes.get(a) for a in chosen}
        self._cast(state, chosen)
        after = self._cost(state) if self._track_cost else None

        rolled_back = 0
        if simultaneous and self.schedule.rollback and before is not None and after is not None and after > before:
            for a, vote in undo.items():
                if vote is None:
                    del state.votes[a]
                    state.abstaining.add(a)
                else:
                    state.votes[a] = vote
                state.dissatisfied.add(a)
            state.stats.votes_cast -= len(chosen)
            state.stats.rollbacks += 1
            state.stats.votes_retracted += len(chosen)
            log.debug(f"iter {state.iteration}: rollback of {len(chosen)} votes ({before} -> {after})")
            chosen = self._select(state, 1)
            self._cast(state, chosen)
            after = self._cost(state)
            rolled_back = 1

        if after is not None:
            state.cost = after
            state.cost_history.append(after)
        state.changing = set(chosen)
        state.reacting = self._reacting_from(chosen)
        self._record(state, len(chosen), rolled_back)
        return state

    def _record(self, state: VoteState, votes_cast: int, rollback: int) -> None:
        if state.cost is not None:
            log.debug(f"iter {state.iteration}: cast {votes_cast} cost {state.cost}")
        if self.trace is not None and state.cost is not None:
            self.trace.record(
                TraceRow(state.iteration, state.cost.abstain_count, state.cost.active_cost, votes_cast, rollback)
            )

    def run(self, state: VoteState | None = None) -> RunResult:
        """Step until no factor changes its vote, or `max_iterations`.

        Returns a result with status NON_CONVERGED (and the best votes seen)
        when the iteration cap is hit; see `RunResult.raise_for_status`.
        """
        if state is None:
            state = self.init()
        status = RunStatus.CONVERGED
        best = (state.cost, *state.snapshot_votes())
        try:
            while state.changing:
                if state.stats.iterations >= self.max_iterations:
                    status = RunStatus.NON_CONVERGED
                    log.warn(f"PMP stopped at max_iterations={self.max_iterations}")
                    break
                self.step(state)
                if state.cost is not None and best[0] is not None and state.cost < best[0]:
                    best = (state.cost, *state.snapshot_votes())
        finally:
            self.close()

        votes, abstaining = state.snapshot_votes()
        final = state.cost
        if status is RunStatus.NON_CONVERGED and best[0] is not None and final is not None and best[0] < final:
            final, votes, abstaining = best
        if final is None:
            final = cost_tuple(self.net, votes, abstaining)
        assignment = optimal_assignment(self.net, votes, abstaining)
        log.info(
            f"PMP {status.value}: {state.stats.iterations} iterations, "
            f"{state.stats.opinion_updates} opinion updates, cost {final}"
        )
        return RunResult(
            assignment=assignment,
            cost=final,
            stats=state.stats,
            status=status,
            votes=votes,
            abstaining=abstaining,
            cost_history=list(state.cost_history),
        )

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None


def run(
    net: Network,
    schedule: Schedule | None = None,
    workers: int = 1,
    trace: TraceRecorder | None = None,
    initial_votes: Mapping[int, ArrayLike] | None = None,
) -> RunResult:
    """Initialize and run PMP in one call."""
    engine = PMPEngine(net, schedule, workers=workers, trace=trace)
    return engine.run(engine.init(initial_votes=initial_votes))
