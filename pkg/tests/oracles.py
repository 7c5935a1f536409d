"""Test-only oracles that share no code with the solver."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def exact_solve(matrix, rhs):
    """Gauss-Jordan over Fractions; None if the square system is singular."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def rank(rows) -> int:
    a = [[Fraction(v) for v in row] for row in rows]
    if not a:
        return 0
    r = 0
    for col in range(len(a[0])):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col] / a[r][col]
                a[i] = [v - f * w for v, w in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def _feasible(point, a_eq, b_eq, a_ub, b_ub) -> bool:
    dot = lambda row: sum(Fraction(c) * v for c, v in zip(row, point))
    return (all(dot(r) == b for r, b in zip(a_eq, b_eq))
            and all(dot(r) <= b for r, b in zip(a_ub, b_ub)))


def vertices(a_eq, b_eq, a_ub, b_ub):
    """All vertices of {x : a_eq x = b_eq, a_ub x <= b_ub}, exactly (tiny systems only)."""
    nv = len((a_eq or a_ub)[0])
    need = nv - len(a_eq)
    found = set()
    for tight in itertools.combinations(range(len(a_ub)), need):
        rows = list(a_eq) + [a_ub[t] for t in tight]
        rhs = list(b_eq) + [b_ub[t] for t in tight]
        point = exact_solve(rows, rhs)
        if point is not None and _feasible(point, a_eq, b_eq, a_ub, b_ub):
            found.add(tuple(point))
    return sorted(found)


def egalitarian_system(valuations):
    """Egalitarian program in the original space: variables x row-major then z; x >= 0 as <= rows."""
    n, m = len(valuations), len(valuations[0])
    nv = n * m + 1
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for o in range(m):
        row = [0] * nv
        for i in range(n):
            row[i * m + o] = 1
        a_eq.append(row)
        b_eq.append(1)
    for i in range(n):
        row = [0] * nv
        for o in range(m):
            row[i * m + o] = -valuations[i][o]
        row[-1] = 1
        a_ub.append(row)
        b_ub.append(0)
    for k in range(n * m):
        row = [0] * nv
        row[k] = -1
        a_ub.append(row)
        b_ub.append(0)
    return a_eq, b_eq, a_ub, b_ub


def pareto_system(valuations, base):
    n, m = len(valuations), len(valuations[0])
    nv = n * m
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for o in range(m):
        row = [0] * nv
        for i in range(n):
            row[i * m + o] = 1
        a_eq.append(row)
        b_eq.append(1)
    for i in range(n):
        row = [0] * nv
        for o in range(m):
            row[i * m + o] = -valuations[i][o]
        a_ub.append(row)
        b_ub.append(-Fraction(base[i]))
    for k in range(nv):
        row = [0] * nv
        row[k] = -1
        a_ub.append(row)
        b_ub.append(0)
    return a_eq, b_eq, a_ub, b_ub


def egalitarian_value_by_vertices(valuations) -> Fraction:
    """Max of z over the vertices of the egalitarian program, found by batch enumeration of tight sets.

    Floats only pick candidate tight sets; every candidate is re-solved and
    re-checked in exact arithmetic, and the best exact z is returned.
    """
    a_eq, b_eq, a_ub, b_ub = egalitarian_system(valuations)
    nv = len(a_eq[0])
    need = nv - len(a_eq)
    combos = np.array(list(itertools.combinations(range(len(a_ub)), need)), dtype=np.int64)
    eq = np.array(a_eq, dtype=float)
    ub = np.array(a_ub, dtype=float)
    beq = np.array(b_eq, dtype=float)
    bub = np.array([float(b) for b in b_ub])
    mats = np.concatenate([np.broadcast_to(eq, (len(combos),) + eq.shape), ub[combos]], axis=1)
    rhs = np.concatenate([np.broadcast_to(beq, (len(combos), len(beq))), bub[combos]], axis=1)
    dets = np.linalg.det(mats)
    ok = np.abs(dets) > 1e-9
    sols = np.linalg.solve(mats[ok], rhs[ok][..., None])[..., 0]
    feas = (np.abs(sols @ eq.T - beq).max(axis=1) < 1e-7) & ((sols @ ub.T - bub).max(axis=1) < 1e-7)
    cand_idx = np.nonzero(ok)[0][feas]
    zs = sols[feas][:, -1]
    best = None
    top = zs.max()
    for idx in cand_idx[zs >= top - 1e-7]:
        tight = combos[idx]
        point = exact_solve(list(a_eq) + [a_ub[t] for t in tight], list(b_eq) + [b_ub[t] for t in tight])
        if point is not None and _feasible(point, a_eq, b_eq, a_ub, b_ub):
            best = point[-1] if best is None else max(best, point[-1])
    return best


def all_discrete(n, m):
    return itertools.product(range(n), repeat=m)
