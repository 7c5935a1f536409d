"""Make a consumption graph acyclic without harming any agent.

Easy edges (a share held by someone who values the object <= 0 while a
co-sharer values it >= 0) are handed over first.  Remaining cycles are
cancelled by trading utility around them: every agent on the cycle except
the pivot ends exactly where it started, the pivot does not lose, and at
least one share on the cycle drops to zero.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    ConsumptionGraph,
    Cycle,
    FractionalAllocation,
    Instance,
    PreconditionError,
    build_consumption_graph,
    utilities,
)

logger = logging.getLogger(__name__)

FORWARD = "forward"
REVERSED = "reversed"
_ZERO = Fraction(0)


@dataclass(frozen=True)
class Hop:
    """Utility moves from ``giver`` to ``receiver`` by re-splitting ``obj``.

    ``gain`` is the receiver's utility gain per unit of transfer amount and
    ``loss`` the giver's utility loss per unit.
    """

    giver: int
    receiver: int
    obj: int
    gain: Fraction
    loss: Fraction


@dataclass(frozen=True)
class CycleTransferPlan:
    cycle: Cycle
    direction: str
    gain_ratio: Fraction
    transfer_amount: Fraction
    hops: tuple[Hop, ...]
    deltas: tuple[tuple[int, int, Fraction], ...]

    @property
    def pivot(self) -> int:
        return self.cycle.agents[0]

    @property
    def pivot_change(self) -> Fraction:
        u, r = self.transfer_amount, self.gain_ratio
        return u * (1 - r) if self.direction == FORWARD else u * (r - 1)


@dataclass
class ForestStep:
    """One recorded step of :func:`to_forest` (used for instrumentation)."""

    stage: str
    allocation: FractionalAllocation
    utilities: tuple[Fraction, ...]
    plan: Optional[CycleTransferPlan] = None


@dataclass
class ForestTrace:
    initial_edges: int = 0
    iterations: int = 0
    steps: list = field(default_factory=list)


def remove_easy_edges(instance: Instance, y: FractionalAllocation) -> FractionalAllocation:
    """Hand over every share whose holder values it <= 0 to a co-sharer valuing it >= 0.

    Per object the receiver is the lowest-index sharer with a positive
    value, or failing that the lowest-index neutral sharer; every other
    sharer with value <= 0 gives its whole share to it.  Afterwards each
    split object is strictly good for all its sharers or strictly bad for
    all of them.
    """
    x = y.to_lists()
    n = instance.n
    for o in range(instance.m):
        sharers = [i for i in range(n) if x[i][o] > 0]
        if len(sharers) < 2:
            continue
        receiver = next((i for i in sharers if instance.value(i, o) > 0), None)
        if receiver is None:
            receiver = next((i for i in sharers if instance.value(i, o) == 0), None)
        if receiver is None:
            continue
        for i in sharers:
            if i != receiver and instance.value(i, o) <= 0:
                x[receiver][o] += x[i][o]
                x[i][o] = _ZERO
    return FractionalAllocation(tuple(tuple(row) for row in x))


def find_cycle(graph: ConsumptionGraph) -> Optional[Cycle]:
    """Return a shortest simple cycle, or None if the graph is a forest.

    Runs a BFS from every agent and keeps the shortest cycle closed by a
    non-tree edge; ties go to the lowest root agent, then BFS discovery
    order.  The returned cycle starts at its root agent, oriented so the
    smaller of the root's two cycle objects comes first.
    """
    if graph.is_forest():
        return None
    best = None
    for root in range(graph.n):
        if not graph.agent_adjacency[root]:
            continue
        found = _shortest_cycle_through_bfs(graph, root, best_len=None if best is None else len(best))
        if found is not None and (best is None or len(found) < len(best)):
            best = found
            if len(best) == 4:
                break
    return best


def _neighbours(graph, v):
    kind, idx = v
    if kind == "a":
        return [("o", o) for o in sorted(graph.agent_adjacency[idx])]
    return [("a", a) for a in sorted(graph.object_adjacency[idx])]


def _shortest_cycle_through_bfs(graph, root, best_len):
    start = ("a", root)
    parent = {start: None}
    depth = {start: 0}
    queue = deque([start])
    best = None
    while queue:
        u = queue.popleft()
        if best is not None and 2 * depth[u] + 1 >= best[0]:
            break
        for v in _neighbours(graph, u):
            if v not in depth:
                parent[v] = u
                depth[v] = depth[u] + 1
                queue.append(v)
            elif parent[u] != v:
                length = depth[u] + depth[v] + 1
                if best is None or length < best[0]:
                    cycle = _close(parent, u, v)
                    if cycle is not None:
                        best = (length, cycle)
    if best is None or (best_len is not None and best[0] >= best_len):
        return None
    return best[1]


def _path_to_root(parent, v):
    path = []
    while v is not None:
        path.append(v)
        v = parent[v]
    return path


def _close(parent, u, v):
    pu, pv = _path_to_root(parent, u), _path_to_root(parent, v)
    if set(pu[:-1]) & set(pv[:-1]):
        return None
    # root ... u, v ... (back to root)
    walk = list(reversed(pu)) + pv[:-1]
    agents = [idx for kind, idx in walk if kind == "a"]
    objects = [idx for kind, idx in walk if kind == "o"]
    if objects[0] > objects[-1]:
        # canonical orientation: the smaller of the root's two cycle objects comes first
        agents = agents[:1] + agents[:0:-1]
        objects = objects[::-1]
    return Cycle(tuple(agents), tuple(objects))


def _hop_chain(instance, cycle: Cycle, direction: str) -> list[tuple[int, int, int]]:
    """(giver, receiver, object) in chain order for the chosen direction.

    Forward: the pivot receives over o_k from a_k, a_k is compensated over
    o_{k-1} from a_{k-1}, and so on until a_2 is paid by the pivot over o_1.
    Reversed: the pivot gives over o_k to a_k, who passes it on over
    o_{k-1}, until a_2 hands it back to the pivot over o_1.
    """
    a, o, k = cycle.agents, cycle.objects, cycle.k
    chain = []
    for h in range(k):
        j = k - 1 - h                       # object o_{j}, joining a_j and a_{j+1}
        left, right = a[j], a[(j + 1) % k]
        if direction == FORWARD:
            chain.append((left, right, o[j]))
        else:
            chain.append((right, left, o[j]))
    return chain


def plan_cycle_removal(instance: Instance, y: FractionalAllocation, cycle: Cycle) -> CycleTransferPlan:
    """Choose the non-harmful direction and largest transfer cancelling ``cycle``.

    Requires every cycle edge to carry a nonzero value and each cycle
    object to be good for both adjacent sharers or bad for both.
    """
    for left, obj, right in cycle.hops():
        ul, ur = instance.value(left, obj), instance.value(right, obj)
        if ul == 0 or ur == 0:
            raise PreconditionError(f"zero valuation on cycle object {obj}")
        if (ul > 0) != (ur > 0):
            raise PreconditionError(f"object {obj} on the cycle is split between a good and a bad")
        if y.share(left, obj) <= 0 or y.share(right, obj) <= 0:
            raise PreconditionError(f"cycle edge at object {obj} is not in the consumption graph")

    ratio = Fraction(1)
    for giver, receiver, obj in _hop_chain(instance, cycle, FORWARD):
        ratio *= abs(instance.value(giver, obj)) / abs(instance.value(receiver, obj))
    direction = FORWARD if ratio <= 1 else REVERSED

    hops = []
    coeff = Fraction(1)
    for giver, receiver, obj in _hop_chain(instance, cycle, direction):
        rho = abs(instance.value(giver, obj)) / abs(instance.value(receiver, obj))
        if direction == FORWARD:
            gain, loss = coeff, coeff * rho      # receiver gain drives the chain
            coeff = loss
        else:
            gain, loss = coeff / rho, coeff      # giver loss drives the chain
            coeff = gain
        hops.append(Hop(giver, receiver, obj, gain, loss))

    bound = None
    for hop in hops:
        u_recv = abs(instance.value(hop.receiver, hop.obj))
        # Goods shrink the giver's share, bads shrink the receiver's share.
        holder = hop.giver if instance.value(hop.receiver, hop.obj) > 0 else hop.receiver
        cap = y.share(holder, hop.obj) * u_recv / hop.gain
        bound = cap if bound is None else min(bound, cap)

    deltas = []
    for hop in hops:
        frac = bound * hop.gain / abs(instance.value(hop.receiver, hop.obj))
        if instance.value(hop.receiver, hop.obj) > 0:
            deltas.append((hop.receiver, hop.obj, frac))
            deltas.append((hop.giver, hop.obj, -frac))
        else:
            deltas.append((hop.receiver, hop.obj, -frac))
            deltas.append((hop.giver, hop.obj, frac))
    return CycleTransferPlan(cycle, direction, ratio, bound, tuple(hops), tuple(deltas))


def apply_plan(y: FractionalAllocation, plan: CycleTransferPlan) -> FractionalAllocation:
    x = y.to_lists()
    for agent, obj, delta in plan.deltas:
        x[agent][obj] += delta
    return FractionalAllocation(tuple(tuple(row) for row in x))


def to_forest(instance: Instance, x: FractionalAllocation,
              trace: Optional[ForestTrace] = None) -> FractionalAllocation:
    """Weak Pareto improvement of ``x`` whose consumption graph is a forest.

    Every split object in the result is strictly good for all its sharers
    or strictly bad for all of them.
    """
    graph = build_consumption_graph(x)
    if trace is not None:
        trace.initial_edges = graph.edge_count
    y = remove_easy_edges(instance, x)
    if trace is not None:
        trace.steps.append(ForestStep("remove_easy_edges", y, utilities(instance, y)))
    iterations = 0
    while True:
        cycle = find_cycle(build_consumption_graph(y))
        if cycle is None:
            break
        plan = plan_cycle_removal(instance, y, cycle)
        y = apply_plan(y, plan)
        iterations += 1
        logger.debug("cancelled %d-cycle, direction %s, r=%s", cycle.k, plan.direction, plan.gain_ratio)
        if trace is not None:
            trace.steps.append(ForestStep("apply_plan", y, utilities(instance, y), plan))
    if trace is not None:
        trace.iterations = iterations
    return y
