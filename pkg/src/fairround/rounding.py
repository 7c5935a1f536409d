"""Round a forest-shaped fractional allocation to a discrete one by peeling leaves."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    DiscreteAllocation,
    FractionalAllocation,
    Instance,
    PreconditionError,
    build_consumption_graph,
    utilities,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Heap keys are (index, kind) so objects win ties against agents.
OBJECT, AGENT = 0, 1

ASSIGN_OBJECT = "assign_object"     # object leaf goes to its only neighbour
PASS_SHARE = "pass_share"           # agent leaf hands its share of a good on
TAKE_OBJECT = "take_object"         # agent leaf takes the whole object
DROP_ISOLATED = "drop_isolated"


@dataclass
class PeelStep:
    vertex: tuple[int, int]
    action: str
    obj: Optional[int]
    recipient: Optional[int]
    utilities: tuple[Fraction, ...]
    present_agents: frozenset


@dataclass
class RoundingTrace:
    steps: list = field(default_factory=list)
    # agent -> object involved when the agent left the graph (None if isolated)
    departure_object: dict = field(default_factory=dict)


class LeafPeeler:
    """Mutable working state of the rounding loop.

    Exposed so the loop body (:meth:`step`) can be driven and inspected one
    vertex at a time.
    """

    def __init__(self, instance: Instance, y: FractionalAllocation):
        check_rounding_input(instance, y)
        self.instance = instance
        self.z = y.to_lists()
        graph = build_consumption_graph(y)
        self.agent_adj = [set(s) for s in graph.agent_adjacency]
        self.object_adj = [set(s) for s in graph.object_adjacency]
        self.present = {(i, AGENT) for i in range(instance.n)} | {(o, OBJECT) for o in range(instance.m)}
        self._running = [sum((u * x for u, x in zip(instance.valuations[i], self.z[i]) if x), _ZERO)
                         for i in range(instance.n)]
        self._heap = []
        self._queued = set()
        for v in self.present:
            self._maybe_queue(v)

    def _degree(self, v) -> int:
        idx, kind = v
        return len(self.agent_adj[idx]) if kind == AGENT else len(self.object_adj[idx])

    def _maybe_queue(self, v) -> None:
        if v in self.present and v not in self._queued and self._degree(v) <= 1:
            self._queued.add(v)
            heapq.heappush(self._heap, v)

    def _set_share(self, agent, obj, value) -> None:
        old = self.z[agent][obj]
        if old != value:
            self._running[agent] += self.instance.value(agent, obj) * (value - old)
            self.z[agent][obj] = value

    def _drop_edge(self, agent, obj) -> None:
        self.agent_adj[agent].discard(obj)
        self.object_adj[obj].discard(agent)
        self._maybe_queue((agent, AGENT))
        self._maybe_queue((obj, OBJECT))

    def _give_whole(self, obj, agent) -> None:
        for other in list(self.object_adj[obj]):
            if other != agent:
                self._set_share(other, obj, _ZERO)
                self._drop_edge(other, obj)
        self._set_share(agent, obj, _ONE)

    @property
    def done(self) -> bool:
        return not self.present

    def running_utilities(self) -> tuple[Fraction, ...]:
        return tuple(self._running)

    def step(self) -> PeelStep:
        """Remove one leaf (or isolated vertex) from the graph."""
        if not self._heap:
            raise PreconditionError("no leaf left in a non-empty graph; input had a cycle")
        v = heapq.heappop(self._heap)
        idx, kind = v
        obj = recipient = None
        if kind == OBJECT:
            sharers = self.object_adj[idx]
            if sharers:
                (recipient,) = sharers
                self._give_whole(idx, recipient)
                self._drop_edge(recipient, idx)
                action, obj = ASSIGN_OBJECT, idx
            else:
                if sum(self.z[i][idx] for i in range(self.instance.n)) != 1 or \
                        not any(self.z[i][idx] == 1 for i in range(self.instance.n)):
                    raise AssertionError(f"object {idx} left the graph without an owner")
                action = DROP_ISOLATED
        else:
            objs = self.agent_adj[idx]
            if not objs:
                action = DROP_ISOLATED
            else:
                (obj,) = objs
                others = [k for k in self.object_adj[obj] if k != idx]
                takers = [k for k in others if self.instance.value(k, obj) > 0]
                if takers:
                    recipient = min(takers, key=lambda k: (-self.instance.value(k, obj), k))
                    self._set_share(recipient, obj, self.z[recipient][obj] + self.z[idx][obj])
                    self._set_share(idx, obj, _ZERO)
                    self._drop_edge(idx, obj)
                    action = PASS_SHARE
                else:
                    recipient = idx
                    self._give_whole(obj, idx)
                    self._drop_edge(idx, obj)
                    action = TAKE_OBJECT
        self.present.discard(v)
        present_agents = frozenset(i for i, k in self.present if k == AGENT)
        return PeelStep(v, action, obj, recipient, self.running_utilities(), present_agents)

    def result(self) -> DiscreteAllocation:
        if not self.done:
            raise RuntimeError("peeling not finished")
        alloc = FractionalAllocation(tuple(tuple(row) for row in self.z))
        if not alloc.is_discrete():
            raise AssertionError("rounding finished with fractional shares")
        return alloc.to_discrete()


def check_rounding_input(instance: Instance, y: FractionalAllocation) -> None:
    """Raise PreconditionError unless ``y`` is a forest with same-sign splits."""
    if y.n != instance.n or y.m != instance.m:
        raise PreconditionError("allocation does not match instance")
    graph = build_consumption_graph(y)
    if not graph.is_forest():
        raise PreconditionError("consumption graph has a cycle")
    for o, sharers in enumerate(graph.object_adjacency):
        if len(sharers) > 1:
            signs = {(instance.value(i, o) > 0) - (instance.value(i, o) < 0) for i in sharers}
            if signs not in ({1}, {-1}):
                raise PreconditionError(f"object {o} is split between agents disagreeing on its sign")


def leaf_queue_step(peeler: LeafPeeler) -> PeelStep:
    return peeler.step()


def round_allocation(instance: Instance, y: FractionalAllocation,
                     trace: Optional[RoundingTrace] = None) -> DiscreteAllocation:
    """Discrete allocation where each agent loses at most one object's worth.

    Leaves are taken lowest index first, objects before agents on ties.  A
    departing agent passes its share of a good to the co-sharer valuing it
    most (lowest index on ties); otherwise it takes the whole object.
    """
    peeler = LeafPeeler(instance, y)
    while not peeler.done:
        step = peeler.step()
        if trace is not None:
            trace.steps.append(step)
            idx, kind = step.vertex
            if kind == AGENT:
                trace.departure_object[idx] = step.obj
    return peeler.result()
