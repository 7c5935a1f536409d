"""Dense two-phase primal simplex over exact rationals with Bland's rule."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ..core import StructuralError, to_rational

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class LpProblem:
    """Maximize ``objective . x`` subject to

    ``a_eq x = b_eq``, ``a_ub x <= b_ub`` and ``lower <= x <= upper``.

    ``lower`` defaults to 0 for every variable; an ``upper`` entry of None
    means unbounded above.  ``labels`` is free-form per-column metadata.
    """

    objective: Sequence
    a_eq: Sequence[Sequence] = ()
    b_eq: Sequence = ()
    a_ub: Sequence[Sequence] = ()
    b_ub: Sequence = ()
    lower: Optional[Sequence] = None
    upper: Optional[Sequence] = None
    labels: Optional[Sequence] = None

    def __post_init__(self):
        self.objective = [to_rational(c) for c in self.objective]
        nv = len(self.objective)
        self.a_eq = [[to_rational(v) for v in row] for row in self.a_eq]
        self.a_ub = [[to_rational(v) for v in row] for row in self.a_ub]
        self.b_eq = [to_rational(v) for v in self.b_eq]
        self.b_ub = [to_rational(v) for v in self.b_ub]
        self.lower = [_ZERO] * nv if self.lower is None else [to_rational(v) for v in self.lower]
        self.upper = [None] * nv if self.upper is None else [
            None if v is None else to_rational(v) for v in self.upper]
        if len(self.a_eq) != len(self.b_eq) or len(self.a_ub) != len(self.b_ub):
            raise StructuralError("constraint matrix and right-hand side lengths differ")
        for row in (*self.a_eq, *self.a_ub):
            if len(row) != nv:
                raise StructuralError("constraint row length differs from variable count")
        if len(self.lower) != nv or len(self.upper) != nv:
            raise StructuralError("bound vectors must have one entry per variable")
        if self.labels is not None and len(self.labels) != nv:
            raise StructuralError("one label per variable expected")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def is_feasible(self, values: Sequence[Fraction]) -> bool:
        """Exact re-substitution check of every constraint and bound."""
        if len(values) != self.num_vars:
            return False
        for row, b in zip(self.a_eq, self.b_eq):
            if sum((a * v for a, v in zip(row, values) if a), _ZERO) != b:
                return False
        for row, b in zip(self.a_ub, self.b_ub):
            if sum((a * v for a, v in zip(row, values) if a), _ZERO) > b:
                return False
        for v, lo, hi in zip(values, self.lower, self.upper):
            if v < lo or (hi is not None and v > hi):
                return False
        return True


@dataclass
class LpSolution:
    """Outcome of :func:`solve_simplex`.

    ``basis`` indexes the standard-form columns: the first ``num_vars``
    are the problem variables, the rest are slacks in constraint order
    (inequality rows, then finite upper bounds).
    """

    status: str
    values: Optional[tuple] = None
    objective_value: Optional[Fraction] = None
    basis: frozenset = field(default_factory=frozenset)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows        # list[list[Fraction]] with ncols entries each
        self.rhs = rhs          # list[Fraction]
        self.basis = basis      # basic column per row
        self.ncols = ncols
        self.pivots = 0

    def reduced_costs(self, cost):
        d = list(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[r]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d

    def pivot(self, r, j, d):
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            for k in range(self.ncols):
                if row[k]:
                    row[k] *= inv
            self.rhs[r] *= inv
        nz = [k for k in range(self.ncols) if row[k]]
        b_r = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[j]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
                if b_r:
                    self.rhs[i] -= f * b_r
        f = d[j]
        if f:
            for k in nz:
                d[k] -= f * row[k]
        self.basis[r] = j
        self.pivots += 1

    def run(self, d, allowed) -> str:
        """Maximize; ``d`` holds reduced costs and is updated in place."""
        while True:
            entering = next((j for j in range(self.ncols) if allowed[j] and d[j] > 0), None)
            if entering is None:
                return OPTIMAL
            best_r, best_ratio = None, None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[r] < self.basis[best_r])):
                        best_r, best_ratio = r, ratio
            if best_r is None:
                return UNBOUNDED
            self.pivot(best_r, entering, d)


def solve_simplex(problem: LpProblem) -> LpSolution:
    """Solve ``problem`` exactly; an optimal answer is always a basic feasible solution.

    Bland's rule (lowest-index entering column, lowest-index leaving basic
    variable on ratio ties) makes the method terminate without any
    perturbation.
    """
    nv = problem.num_vars
    lower = problem.lower
    shift = lambda row: sum((a * l for a, l in zip(row, lower) if a and l), _ZERO)

    # Standard form over x' = x - lower >= 0.
    eq_rows = [(list(row), b - shift(row), None) for row, b in zip(problem.a_eq, problem.b_eq)]
    ub_rows = [(list(row), b - shift(row)) for row, b in zip(problem.a_ub, problem.b_ub)]
    for j, hi in enumerate(problem.upper):
        if hi is not None:
            row = [_ZERO] * nv
            row[j] = _ONE
            ub_rows.append((row, hi - lower[j]))
    n_slack = len(ub_rows)
    n_rows = len(eq_rows) + n_slack

    rows, rhs, basis = [], [], []
    need_artificial = []
    for row, b, _ in eq_rows:
        full = row + [_ZERO] * n_slack
        if b < 0:
            full = [-v for v in full]
            b = -b
        rows.append(full)
        rhs.append(b)
        need_artificial.append(True)
    for s, (row, b) in enumerate(ub_rows):
        full = row + [_ZERO] * n_slack
        full[nv + s] = _ONE
        if b < 0:
            full = [-v for v in full]
            b = -b
            need_artificial.append(True)
        else:
            need_artificial.append(False)
        rows.append(full)
        rhs.append(b)

    n_struct = nv + n_slack
    n_art = sum(need_artificial)
    ncols = n_struct + n_art
    a_col = n_struct
    for r in range(n_rows):
        rows[r].extend([_ZERO] * n_art)
        if need_artificial[r]:
            rows[r][a_col] = _ONE
            basis.append(a_col)
            a_col += 1
        else:
            basis.append(nv + (r - len(eq_rows)))

    tab = _Tableau(rows, rhs, basis, ncols)

    if n_art:
        cost1 = [_ZERO] * n_struct + [-_ONE] * n_art
        d = tab.reduced_costs(cost1)
        tab.run(d, [True] * ncols)
        if any(tab.rhs[r] for r in range(len(tab.rows)) if tab.basis[r] >= n_struct):
            logger.debug("phase one ended with positive artificial sum")
            return LpSolution(INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis or drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= n_struct:
                j = next((j for j in range(n_struct) if tab.rows[r][j]), None)
                if j is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, j, [_ZERO] * ncols)
            r += 1

    allowed = [j < n_struct for j in range(ncols)]
    cost2 = list(problem.objective) + [_ZERO] * (ncols - nv)
    d = tab.reduced_costs(cost2)
    status = tab.run(d, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)

    xs = [_ZERO] * ncols
    for r, b in enumerate(tab.basis):
        xs[b] = tab.rhs[r]
    values = tuple(xs[j] + lower[j] for j in range(nv))
    obj = sum((c * v for c, v in zip(problem.objective, values) if c), _ZERO)
    return LpSolution(OPTIMAL, values, obj, frozenset(tab.basis), tab.pivots)
