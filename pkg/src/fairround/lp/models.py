"""LP models for fractional fair allocations.

Column order is row-major over (agent, object); the egalitarian program
appends its level variable ``z`` last.
"""
from __future__ import annotations

from fractions import Fraction

from ..core import FractionalAllocation, Instance, StructuralError, utilities
from .simplex import LpProblem, LpSolution, solve_simplex

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LpFailure(RuntimeError):
    """An allocation LP did not reach an optimum (indicates a bug)."""


def _column_sum_rows(n: int, m: int, extra: int = 0):
    rows = []
    for o in range(m):
        row = [_ZERO] * (n * m + extra)
        for i in range(n):
            row[i * m + o] = _ONE
        rows.append(row)
    return rows, [_ONE] * m


def _shares_from(values, n: int, m: int) -> FractionalAllocation:
    return FractionalAllocation(tuple(tuple(values[i * m:(i + 1) * m]) for i in range(n)))


def egalitarian_problem(instance: Instance) -> LpProblem:
    """max z  s.t.  z <= u_i(x) for all agents, column sums 1, x >= 0.

    ``z`` is bounded below by ``min_i sum_o min(u_io, 0)``, a level every
    allocation reaches, so that every variable has a finite lower bound.
    """
    n, m = instance.n, instance.m
    nv = n * m + 1
    a_eq, b_eq = _column_sum_rows(n, m, extra=1)
    a_ub, b_ub = [], []
    for i in range(n):
        row = [_ZERO] * nv
        for o in range(m):
            row[i * m + o] = -instance.value(i, o)
        row[-1] = _ONE
        a_ub.append(row)
        b_ub.append(_ZERO)
    z_floor = min(sum((min(u, _ZERO) for u in row), _ZERO) for row in instance.valuations)
    objective = [_ZERO] * (nv - 1) + [_ONE]
    labels = [(i, o) for i in range(n) for o in range(m)] + ["z"]
    return LpProblem(objective, a_eq, b_eq, a_ub, b_ub,
                     lower=[_ZERO] * (nv - 1) + [z_floor], labels=labels)


def egalitarian_fractional(instance: Instance) -> tuple[FractionalAllocation, Fraction]:
    """Fractional max-min allocation and its value ``z``."""
    sol = solve_simplex(egalitarian_problem(instance))
    if not sol.optimal:
        raise LpFailure(f"egalitarian LP ended with status {sol.status}")
    n, m = instance.n, instance.m
    return _shares_from(sol.values, n, m), sol.values[-1]


def pareto_problem(instance: Instance, x, *, column_order=None) -> LpProblem:
    """max sum_i u_i(y)  s.t.  u_i(y) >= u_i(x), column sums 1, y >= 0.

    ``column_order`` optionally permutes the LP columns (a list mapping LP
    column to row-major (agent, object) position); it only changes which
    optimal vertex Bland's rule reaches.
    """
    n, m = instance.n, instance.m
    if x.n != n or x.m != m:
        raise StructuralError("allocation does not match instance")
    base = utilities(instance, x)
    nv = n * m
    order = list(range(nv)) if column_order is None else list(column_order)
    if sorted(order) != list(range(nv)):
        raise StructuralError("column_order must be a permutation")
    pos = {k: col for col, k in enumerate(order)}
    val = lambda k: instance.value(k // m, k % m)

    objective = [val(k) for k in order]
    a_eq = []
    for o in range(m):
        row = [_ZERO] * nv
        for i in range(n):
            row[pos[i * m + o]] = _ONE
        a_eq.append(row)
    b_eq = [_ONE] * m
    a_ub, b_ub = [], []
    for i in range(n):
        row = [_ZERO] * nv
        for o in range(m):
            row[pos[i * m + o]] = -instance.value(i, o)
        a_ub.append(row)
        b_ub.append(-base[i])
    labels = [(k // m, k % m) for k in order]
    return LpProblem(objective, a_eq, b_eq, a_ub, b_ub, labels=labels)


def _solve_pareto(instance, x, column_order=None) -> tuple[FractionalAllocation, LpSolution]:
    if instance.m == 0:
        return FractionalAllocation(tuple(() for _ in range(instance.n))), LpSolution(
            "optimal", (), _ZERO)
    problem = pareto_problem(instance, x, column_order=column_order)
    sol = solve_simplex(problem)
    if not sol.optimal:
        raise LpFailure(f"Pareto LP ended with status {sol.status}")
    nv = instance.n * instance.m
    values = [_ZERO] * nv
    for col, (i, o) in enumerate(problem.labels):
        values[i * instance.m + o] = sol.values[col]
    return _shares_from(values, instance.n, instance.m), sol


def pareto_improve(instance: Instance, x) -> FractionalAllocation:
    """Utilitarian-optimal allocation among those weakly dominating ``x``.

    The result is fPO and, being a simplex vertex, its consumption graph is
    acyclic once neutral splits are consolidated.
    """
    return _solve_pareto(instance, x.to_fractional())[0]


def pareto_optimum_value(instance: Instance, x) -> Fraction:
    """Optimal utility sum of the Pareto-improvement program seeded with ``x``."""
    return _solve_pareto(instance, x.to_fractional())[1].objective_value


def pareto_improve_blend(instance: Instance, x) -> FractionalAllocation:
    """Midpoint of two optimal vertices of the Pareto program.

    The vertices are reached with forward and reversed column orders.  The
    midpoint is still optimal, hence fPO, but generally not a vertex, so
    its consumption graph may contain cycles.
    """
    x = x.to_fractional()
    first = _solve_pareto(instance, x)[0]
    nv = instance.n * instance.m
    second = _solve_pareto(instance, x, column_order=list(reversed(range(nv))))[0]
    half = Fraction(1, 2)
    return FractionalAllocation(tuple(
        tuple(half * (a + b) for a, b in zip(r1, r2))
        for r1, r2 in zip(first.shares, second.shares)))


def proportional_fractional(instance: Instance) -> FractionalAllocation:
    """Every agent receives 1/n of every object."""
    share = Fraction(1, instance.n)
    return FractionalAllocation(tuple((share,) * instance.m for _ in range(instance.n)))
