"""Problem instance, allocations, consumption graphs and Pareto predicates.

All numbers are :class:`fractions.Fraction`; nothing in the package ever
touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction


class StructuralError(ValueError):
    """Shapes or identifiers do not fit together."""


class PreconditionError(ValueError):
    """An algorithm was called on input that violates its contract."""


def to_rational(value) -> Fraction:
    """Convert an int, Fraction, ``"p/q"`` or decimal string to an exact Fraction.

    Floats are rejected since they rarely denote the number the user meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                p, q = int(num), int(den)
            except ValueError:
                raise ValueError(f"malformed rational {value!r}") from None
            if q == 0:
                raise ZeroDivisionError(f"zero denominator in {value!r}")
            return Fraction(p, q)
        try:
            dec = Decimal(text)
        except InvalidOperation:
            raise ValueError(f"malformed number {value!r}") from None
        if not dec.is_finite():
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(dec)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def _matrix(rows: Iterable[Iterable], name: str) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(to_rational(v) for v in row) for row in rows)


@dataclass(frozen=True)
class Instance:
    """An ``n x m`` valuation matrix with agent and object labels.

    Row ``i`` holds agent ``i``'s additive values; entries of any sign are
    allowed, so the same object may be a good for one agent and a chore for
    another.
    """

    agents: tuple[str, ...]
    objects: tuple[str, ...]
    valuations: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "valuations", _matrix(self.valuations, "valuations"))
        if len(self.agents) < 1:
            raise StructuralError("an instance needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise StructuralError("duplicate agent names")
        if len(set(self.objects)) != len(self.objects):
            raise StructuralError("duplicate object names")
        if len(self.valuations) != len(self.agents):
            raise StructuralError(
                f"{len(self.valuations)} valuation rows for {len(self.agents)} agents")
        for i, row in enumerate(self.valuations):
            if len(row) != len(self.objects):
                raise StructuralError(
                    f"row {i} has {len(row)} entries, expected {len(self.objects)}")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence], agents=None, objects=None) -> "Instance":
        rows = [list(r) for r in matrix]
        n = len(rows)
        m = len(rows[0]) if rows else 0
        if agents is None:
            agents = [f"a{i}" for i in range(n)]
        if objects is None:
            objects = [f"o{j}" for j in range(m)]
        return cls(tuple(agents), tuple(objects), rows)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.objects)

    def value(self, agent: int, obj: int) -> Fraction:
        return self.valuations[agent][obj]

    def max_abs_value(self, agent: int) -> Fraction:
        """Largest absolute value agent assigns to a single object (0 if m = 0)."""
        return max((abs(v) for v in self.valuations[agent]), default=Fraction(0))

    def total_value(self, agent: int) -> Fraction:
        return sum(self.valuations[agent], Fraction(0))

    def sub_instance(self, agents: Sequence[int], objects: Sequence[int]) -> "Instance":
        return Instance(
            tuple(self.agents[i] for i in agents),
            tuple(self.objects[o] for o in objects),
            [[self.valuations[i][o] for o in objects] for i in agents],
        )


@dataclass(frozen=True)
class FractionalAllocation:
    """Shares ``x[i][o]`` in [0, 1] with every column summing to exactly 1."""

    shares: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        shares = _matrix(self.shares, "shares")
        object.__setattr__(self, "shares", shares)
        if not shares:
            raise StructuralError("an allocation needs at least one agent row")
        m = len(shares[0])
        for i, row in enumerate(shares):
            if len(row) != m:
                raise StructuralError(f"ragged share matrix at row {i}")
            for o, x in enumerate(row):
                if x < 0 or x > 1:
                    raise StructuralError(f"share x[{i}][{o}] = {x} outside [0, 1]")
        for o in range(m):
            total = sum((row[o] for row in shares), Fraction(0))
            if total != 1:
                raise StructuralError(f"shares of object {o} sum to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.shares)

    @property
    def m(self) -> int:
        return len(self.shares[0])

    def share(self, agent: int, obj: int) -> Fraction:
        return self.shares[agent][obj]

    def to_lists(self) -> list[list[Fraction]]:
        return [list(row) for row in self.shares]

    def is_discrete(self) -> bool:
        return all(x in (0, 1) for row in self.shares for x in row)

    def to_discrete(self) -> "DiscreteAllocation":
        if not self.is_discrete():
            raise StructuralError("allocation has split objects")
        owner = [next(i for i in range(self.n) if self.shares[i][o] == 1) for o in range(self.m)]
        return DiscreteAllocation(tuple(owner), self.n)

    def to_fractional(self) -> "FractionalAllocation":
        return self


@dataclass(frozen=True)
class DiscreteAllocation:
    """Each object ``o`` is owned entirely by agent ``owner[o]``."""

    owner: tuple[int, ...]
    n_agents: int

    def __post_init__(self):
        object.__setattr__(self, "owner", tuple(int(a) for a in self.owner))
        if self.n_agents < 1:
            raise StructuralError("an allocation needs at least one agent")
        for o, a in enumerate(self.owner):
            if not 0 <= a < self.n_agents:
                raise StructuralError(f"object {o} owned by unknown agent {a}")

    @property
    def n(self) -> int:
        return self.n_agents

    @property
    def m(self) -> int:
        return len(self.owner)

    def bundle(self, agent: int) -> list[int]:
        return [o for o, a in enumerate(self.owner) if a == agent]

    def to_fractional(self) -> FractionalAllocation:
        one, zero = Fraction(1), Fraction(0)
        return FractionalAllocation(
            tuple(tuple(one if a == i else zero for a in self.owner) for i in range(self.n_agents)))

    def to_discrete(self) -> "DiscreteAllocation":
        return self


Allocation = Union[FractionalAllocation, DiscreteAllocation]


@dataclass(frozen=True)
class ConsumptionGraph:
    """Bipartite agent/object graph with an edge wherever a share is positive."""

    agent_adjacency: tuple[frozenset, ...]
    object_adjacency: tuple[frozenset, ...]

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.object_adjacency)

    @property
    def n(self) -> int:
        return len(self.agent_adjacency)

    @property
    def m(self) -> int:
        return len(self.object_adjacency)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, o) for i, objs in enumerate(self.agent_adjacency) for o in sorted(objs)]

    def components(self) -> list[tuple[list[int], list[int]]]:
        """Connected components as (agents, objects), ordered by smallest agent."""
        seen_a = [False] * self.n
        seen_o = [False] * self.m
        out = []
        for start in range(self.n):
            if seen_a[start]:
                continue
            agents, objects = [], []
            seen_a[start] = True
            stack = [("a", start)]
            while stack:
                kind, v = stack.pop()
                if kind == "a":
                    agents.append(v)
                    for o in self.agent_adjacency[v]:
                        if not seen_o[o]:
                            seen_o[o] = True
                            stack.append(("o", o))
                else:
                    objects.append(v)
                    for a in self.object_adjacency[v]:
                        if not seen_a[a]:
                            seen_a[a] = True
                            stack.append(("a", a))
            out.append((sorted(agents), sorted(objects)))
        return out

    def is_forest(self) -> bool:
        # A graph is a forest iff |E| = |V| - #components; objects always touch an agent.
        isolated_objects = sum(1 for s in self.object_adjacency if not s)
        return self.edge_count == self.n + self.m - len(self.components()) - isolated_objects


def build_consumption_graph(alloc: Allocation) -> ConsumptionGraph:
    x = alloc.to_fractional().shares
    n, m = len(x), len(x[0])
    agent_adj = tuple(frozenset(o for o in range(m) if x[i][o] > 0) for i in range(n))
    object_adj = tuple(frozenset(i for i in range(n) if x[i][o] > 0) for o in range(m))
    return ConsumptionGraph(agent_adj, object_adj)


@dataclass(frozen=True)
class Cycle:
    """Simple cycle ``a_1, o_1, a_2, o_2, ..., a_k, o_k`` (o_j joins a_j and a_{j+1})."""

    agents: tuple[int, ...]
    objects: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "objects", tuple(self.objects))
        k = len(self.agents)
        if k < 2 or len(self.objects) != k:
            raise StructuralError("a cycle needs k >= 2 agents and exactly k objects")
        if len(set(self.agents)) != k or len(set(self.objects)) != k:
            raise StructuralError("cycle vertices must be distinct")

    @property
    def k(self) -> int:
        return len(self.agents)

    def __len__(self) -> int:
        return 2 * self.k

    def hops(self) -> list[tuple[int, int, int]]:
        """Triples ``(a_j, o_j, a_{j+1})`` with indices taken mod k."""
        k = self.k
        return [(self.agents[j], self.objects[j], self.agents[(j + 1) % k]) for j in range(k)]

    def lies_in(self, graph: ConsumptionGraph) -> bool:
        return all(o in graph.agent_adjacency[a] and o in graph.agent_adjacency[b]
                   for a, o, b in self.hops())


def _check_dims(instance: Instance, alloc: Allocation) -> None:
    if alloc.n != instance.n or alloc.m != instance.m:
        raise StructuralError(
            f"allocation is {alloc.n}x{alloc.m}, instance is {instance.n}x{instance.m}")


def utility(instance: Instance, alloc: Allocation, agent: int) -> Fraction:
    """Exact additive utility of ``agent`` under a fractional or discrete allocation."""
    _check_dims(instance, alloc)
    if not 0 <= agent < instance.n:
        raise StructuralError(f"agent index {agent} out of range")
    row = instance.valuations[agent]
    if isinstance(alloc, DiscreteAllocation):
        return sum((row[o] for o, a in enumerate(alloc.owner) if a == agent), Fraction(0))
    return sum((u * x for u, x in zip(row, alloc.shares[agent]) if x), Fraction(0))


def utilities(instance: Instance, alloc: Allocation) -> tuple[Fraction, ...]:
    return tuple(utility(instance, alloc, i) for i in range(instance.n))


def weakly_dominates(instance: Instance, y: Allocation, x: Allocation) -> bool:
    """True iff every agent is at least as well off under ``y`` as under ``x``."""
    return all(a >= b for a, b in zip(utilities(instance, y), utilities(instance, x)))


def strongly_dominates(instance: Instance, y: Allocation, x: Allocation) -> bool:
    uy, ux = utilities(instance, y), utilities(instance, x)
    return all(a >= b for a, b in zip(uy, ux)) and any(a > b for a, b in zip(uy, ux))
