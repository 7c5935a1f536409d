from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from fairround.core import StructuralError
from fairround.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, solve_simplex

from oracles import rank


def tight_rank(problem, values):
    """Rank of the constraints active at ``values`` (vertex iff == num_vars)."""
    rows = [list(r) for r in problem.a_eq]
    for row, b in zip(problem.a_ub, problem.b_ub):
        if sum(a * v for a, v in zip(row, values)) == b:
            rows.append(list(row))
    for j, v in enumerate(values):
        unit = [0] * problem.num_vars
        unit[j] = 1
        if v == problem.lower[j] or (problem.upper[j] is not None and v == problem.upper[j]):
            rows.append(unit)
    return rank(rows)


def test_single_upper_bound():
    sol = solve_simplex(LpProblem([1], a_ub=[[1]], b_ub=[1]))
    assert sol.status == OPTIMAL and sol.values == (1,) and sol.objective_value == 1


def test_upper_bound_vector():
    sol = solve_simplex(LpProblem([1, 1], upper=[3, "1/2"]))
    assert sol.values == (3, F(1, 2))


def test_optimum_is_a_vertex_not_midpoint():
    p = LpProblem([1, 1], a_eq=[[1, 1]], b_eq=[1])
    sol = solve_simplex(p)
    assert sol.objective_value == 1
    assert sol.values in ((1, 0), (0, 1))
    assert tight_rank(p, sol.values) == 2


def test_infeasible():
    # x >= 1 and x <= 0
    sol = solve_simplex(LpProblem([1], a_ub=[[-1], [1]], b_ub=[-1, 0]))
    assert sol.status == INFEASIBLE and sol.values is None


def test_unbounded():
    sol = solve_simplex(LpProblem([1, 0], a_ub=[[-1, 1]], b_ub=[1]))
    assert sol.status == UNBOUNDED


def test_lower_bounds_shift():
    # max -x s.t. x >= -7/2 (as a bound), x <= 4
    sol = solve_simplex(LpProblem([-1], a_ub=[[1]], b_ub=[4], lower=["-7/2"]))
    assert sol.values == (F(-7, 2),)


def test_redundant_equality_rows():
    p = LpProblem([1, 2], a_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    sol = solve_simplex(p)
    assert sol.values == (0, 1) and p.is_feasible(sol.values)


def test_beale_degenerate_example_terminates():
    # Classic example on which the largest-coefficient rule cycles.
    p = LpProblem(["3/4", -20, "1/2", -6],
                  a_ub=[["1/4", -8, -1, 9], ["1/2", -12, "-1/2", 3], [0, 0, 1, 0]],
                  b_ub=[0, 0, 1])
    sol = solve_simplex(p)
    assert sol.status == OPTIMAL
    assert sol.objective_value == F(5, 4)
    assert sol.values == (1, 0, 1, 0)


def test_malformed_problem():
    with pytest.raises(StructuralError):
        LpProblem([1, 2], a_eq=[[1]], b_eq=[1])
    with pytest.raises(StructuralError):
        LpProblem([1], a_ub=[[1]], b_ub=[])


@st.composite
def small_lp(draw):
    nv = draw(st.integers(1, 4))
    n_eq = draw(st.integers(0, 2))
    n_ub = draw(st.integers(0, 3))
    coef = st.integers(-4, 4)
    c = draw(st.lists(coef, min_size=nv, max_size=nv))
    a_eq = draw(st.lists(st.lists(coef, min_size=nv, max_size=nv), min_size=n_eq, max_size=n_eq))
    b_eq = draw(st.lists(st.integers(-3, 5), min_size=n_eq, max_size=n_eq))
    a_ub = draw(st.lists(st.lists(coef, min_size=nv, max_size=nv), min_size=n_ub, max_size=n_ub))
    b_ub = draw(st.lists(st.integers(-3, 5), min_size=n_ub, max_size=n_ub))
    upper = draw(st.lists(st.one_of(st.none(), st.integers(0, 4)), min_size=nv, max_size=nv))
    return LpProblem(c, a_eq, b_eq, a_ub, b_ub, upper=upper)


@settings(max_examples=300, deadline=None)
@given(small_lp())
def test_matches_highs_and_returns_vertices(p):
    sol = solve_simplex(p)
    kw = {}
    if p.a_eq:
        kw.update(A_eq=np.array(p.a_eq, float), b_eq=np.array(p.b_eq, float))
    if p.a_ub:
        kw.update(A_ub=np.array(p.a_ub, float), b_ub=np.array(p.b_ub, float))
    ref = linprog(-np.array(p.objective, float), bounds=list(zip([0] * p.num_vars, p.upper)),
                  method="highs", **kw)
    expected = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
    assert sol.status == expected
    if sol.optimal:
        assert p.is_feasible(sol.values)
        assert abs(float(sol.objective_value) + ref.fun) < 1e-7
        assert tight_rank(p, sol.values) == p.num_vars
