"""Memory-table payload: stored exemplars, scanned row by row."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike

from memfactor.factors.base import FactorPayload, Opinion, OpinionContext, PayloadKind
from memfactor.graph.kinds import VariableKind, vote_dtype
from memfactor.kernels import EmptySummary, incremental_costs
from memfactor.validation import NetworkValidationError, StructuralError

# relative tolerance under which a previous vote counts as tying the best row
_TIE_RTOL = 1e-12


class MemoryTable(FactorPayload):
    """An L x n array of exemplar vote vectors.

    The selection cost is 0 for any stored row and infinite otherwise, so the
    factor can only ever vote one of its rows. An evidence factor is a table
    with a single row (the observation).
    """

    kind = PayloadKind.TABLE

    def __init__(self, rows: ArrayLike, kinds: tuple[VariableKind, ...] | None = None):
        arr = np.asarray(rows)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise StructuralError(f"Memory table needs at least one row and column, got shape {arr.shape}")
        dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
        if kinds is not None:
            dtype = np.result_type(dtype, vote_dtype(kinds))
        self.rows = np.array(arr, dtype=dtype)
        self.rows.setflags(write=False)
        if kinds is not None:
            self.check_kinds(kinds)
        # per-column (unique values, inverse index) so each opinion evaluates
        # the kernel once per distinct value
        self._columns: tuple[tuple[np.ndarray, np.ndarray], ...] = ()
        if self.n_rows > 1:
            self._columns = tuple(self._unique(self.rows[:, j]) for j in range(self.degree))

    @staticmethod
    def _unique(column: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        uniq, inv = np.unique(column, return_inverse=True)
        return uniq, inv.reshape(-1)

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def degree(self) -> int:
        return int(self.rows.shape[1])

    def __repr__(self) -> str:
        return f"MemoryTable(L={self.n_rows}, n={self.degree})"

    def vote_row(self, index: int) -> np.ndarray:
        """Return row `index` as a full vote vector.

        Raises:
            StructuralError: If the index is out of range.
        """
        if not 0 <= index < self.n_rows:
            raise StructuralError(f"Row {index} out of range for table with {self.n_rows} rows")
        return self.rows[index]

    def fixed_opinion(self) -> Opinion | None:
        """Opinion that does not depend on messages (single-row tables)."""
        if self.n_rows == 1:
            return Opinion(self.rows[0], math.inf)
        return None

    def row_costs(self, ctx: OpinionContext) -> np.ndarray:
        """Total incremental cost of every row under the given summaries."""
        costs = np.zeros(self.n_rows, dtype=np.float64)
        for j, summary in enumerate(ctx.summaries):
            if isinstance(summary, EmptySummary):
                continue
            if self._columns:
                uniq, inv = self._columns[j]
                costs += incremental_costs(uniq, summary, float(ctx.weights[j]))[inv]
            else:
                costs += incremental_costs(self.rows[:, j], summary, float(ctx.weights[j]))
        return costs

    def opinion(self, ctx: OpinionContext) -> Opinion:
        """Minimum-cost row, with best vs second-best distinct row as confidence.

        A previous vote that ties the minimum is kept. Rows identical to the
        chosen one never count as the second best, so duplicates cannot
        inflate confidence.
        """
        fixed = self.fixed_opinion()
        if fixed is not None:
            return fixed

        costs = self.row_costs(ctx)
        best_idx = int(np.argmin(costs))
        best_row = self.rows[best_idx]
        best_cost = float(costs[best_idx])

        if ctx.previous_vote is not None:
            same = np.all(self.rows == ctx.previous_vote, axis=1)
            if same.any():
                prev_cost = float(costs[same][0])
                if prev_cost <= best_cost + _TIE_RTOL * max(1.0, abs(best_cost)):
                    best_row, best_cost = self.rows[int(np.argmax(same))], prev_cost

        distinct = ~np.all(self.rows == best_row, axis=1)
        if not distinct.any():
            return Opinion(best_row, math.inf)
        confidence = max(0.0, float(costs[distinct].min()) - best_cost)
        return Opinion(best_row, confidence)

    def satisfied(self, opinion: np.ndarray, vote: np.ndarray) -> bool:
        return bool(np.array_equal(opinion, vote))

    def is_feasible(self, vote: np.ndarray) -> bool:
        return bool(np.all(self.rows == np.asarray(vote), axis=1).any())

    def check_kinds(self, kinds: tuple[VariableKind, ...]) -> None:
        if len(kinds) != self.degree:
            raise NetworkValidationError(f"Table has {self.degree} columns but is bound to {len(kinds)} variables")
        for j, kind in enumerate(kinds):
            for value in np.unique(self.rows[:, j]):
                if not kind.contains(value):
                    raise NetworkValidationError(f"Table column {j} holds {value!r}, outside {kind!r}")
