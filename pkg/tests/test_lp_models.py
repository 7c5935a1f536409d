import random
from fractions import Fraction as F

import pytest

from fairround.core import FractionalAllocation, Instance, build_consumption_graph, utilities, weakly_dominates
from fairround.forest import find_cycle, remove_easy_edges
from fairround.lp import (
    egalitarian_fractional,
    pareto_improve,
    pareto_improve_blend,
    pareto_optimum_value,
    proportional_fractional,
)

from oracles import all_discrete, egalitarian_value_by_vertices, pareto_system, vertices


def test_single_good_split_evenly():
    x, z = egalitarian_fractional(Instance.from_matrix([[1], [1]]))
    assert z == F(1, 2)
    assert x.shares == ((F(1, 2),), (F(1, 2),))


def test_each_agent_gets_own_good():
    x, z = egalitarian_fractional(Instance.from_matrix([[2, 0], [0, 2]]))
    assert z == 2
    assert min(utilities(Instance.from_matrix([[2, 0], [0, 2]]), x)) == 2


def test_single_chore():
    _, z = egalitarian_fractional(Instance.from_matrix([[-1], [-1]]))
    assert z == F(-1, 2)


def test_no_objects():
    x, z = egalitarian_fractional(Instance(("a", "b"), (), [[], []]))
    assert z == 0 and x.m == 0


# Values computed once with the exact vertex-enumeration oracle.
FROZEN_3x5 = [
    ([[2, -3, 4, -1, -2], [1, -1, 3, -2, 5], [2, 0, 1, 3, 4]], F(65, 14)),
    ([[-2, -1, 3, 0, 3], [-4, -2, 2, 5, -3], [3, -2, 1, -5, 0]], F(11, 3)),
    ([[5, 1, 2, -4, -3], [0, 1, 0, 0, -2], [0, 1, 1, 0, 4]], F(1)),
]


@pytest.mark.parametrize("u,expected", FROZEN_3x5)
def test_egalitarian_value_frozen(u, expected):
    inst = Instance.from_matrix(u)
    x, z = egalitarian_fractional(inst)
    assert z == expected
    assert min(utilities(inst, x)) >= z


@pytest.mark.parametrize("seed", range(4))
def test_egalitarian_value_matches_vertex_enumeration(seed):
    rng = random.Random(100 + seed)
    u = [[rng.randint(-5, 5) for _ in range(5)] for _ in range(3)]
    _, z = egalitarian_fractional(Instance.from_matrix(u))
    assert z == egalitarian_value_by_vertices(u)


def test_lp_value_bounds_every_discrete_allocation():
    rng = random.Random(7)
    for _ in range(40):
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        u = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)]
        _, z = egalitarian_fractional(Instance.from_matrix(u))
        for owner in all_discrete(n, m):
            totals = [sum((u[i][o] for o in range(m) if owner[o] == i), 0) for i in range(n)]
            assert min(totals) <= z


def test_pareto_swap_example():
    inst = Instance.from_matrix([[1, 2], [2, 1]])
    half = F(1, 2)
    x = FractionalAllocation([[half, half], [half, half]])
    # Exhaustive vertex list of the Pareto program: the swap is the unique sum-4 vertex.
    verts = vertices(*pareto_system([[1, 2], [2, 1]], utilities(inst, x)))
    sums = {v: v[0] + 2 * v[1] + 2 * v[2] + v[3] for v in verts}
    best = [v for v, s in sums.items() if s == max(sums.values())]
    assert best == [(0, 1, 1, 0)]
    y = pareto_improve(inst, x)
    assert y.shares == ((0, 1), (1, 0))
    assert utilities(inst, y) == (2, 2)


def test_pareto_keeps_unique_optimum():
    inst = Instance.from_matrix([[3, 0], [0, 3]])
    x = FractionalAllocation([[1, 0], [0, 1]])
    assert utilities(inst, pareto_improve(inst, x)) == (3, 3)


def test_pareto_all_zero():
    inst = Instance.from_matrix([[0]])
    y = pareto_improve(inst, FractionalAllocation([[1]]))
    assert utilities(inst, y) == (0,)


def random_instance(rng, n_max=4, m_max=6):
    n, m = rng.randint(2, n_max), rng.randint(1, m_max)
    return Instance.from_matrix([[rng.randint(-5, 5) for _ in range(m)] for _ in range(n)])


def test_pareto_properties_random():
    rng = random.Random(11)
    for _ in range(60):
        inst = random_instance(rng)
        x, _ = egalitarian_fractional(inst)
        y = pareto_improve(inst, x)
        assert weakly_dominates(inst, y, x)
        # idempotent in utility space, and certifies itself as fPO
        assert utilities(inst, pareto_improve(inst, y)) == utilities(inst, y)
        assert pareto_optimum_value(inst, y) == sum(utilities(inst, y))
        # simplex vertex: acyclic once neutral splits are consolidated
        assert find_cycle(build_consumption_graph(remove_easy_edges(inst, y))) is None


def test_blend_is_optimal_but_may_be_cyclic():
    rng = random.Random(5)
    saw_cycle = False
    for _ in range(200):
        inst = random_instance(rng)
        x, _ = egalitarian_fractional(inst)
        y = pareto_improve_blend(inst, x)
        assert weakly_dominates(inst, y, x)
        assert sum(utilities(inst, y)) == pareto_optimum_value(inst, x)
        if find_cycle(build_consumption_graph(remove_easy_edges(inst, y))) is not None:
            saw_cycle = True
    assert saw_cycle


def test_proportional_seed():
    assert proportional_fractional(Instance.from_matrix([[1, 2]])).shares == ((1, 1),)
    y = proportional_fractional(Instance.from_matrix([[1] * 3] * 4))
    assert all(v == F(1, 4) for row in y.shares for v in row)
    inst = Instance.from_matrix([[3, -1], [1, 1]])
    assert utilities(inst, proportional_fractional(inst)) == (1, 1)
