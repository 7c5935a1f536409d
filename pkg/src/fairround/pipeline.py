"""Seed -> Pareto improvement -> forest -> rounding -> audit."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .core import (
    DiscreteAllocation,
    FractionalAllocation,
    Instance,
    build_consumption_graph,
    utilities,
)
from .forest import ForestTrace, find_cycle, remove_easy_edges, to_forest
from .lp import egalitarian_fractional, pareto_improve, pareto_improve_blend, proportional_fractional
from .oracle import EGALITARIAN, PROPORTIONAL, FairnessReport, audit
from .rounding import RoundingTrace, round_allocation

logger = logging.getLogger(__name__)

SIMPLEX = "simplex"
ITERATIVE = "iterative"
BOTH = "both"
FOREST_METHODS = (SIMPLEX, ITERATIVE, BOTH)
CRITERIA = (EGALITARIAN, PROPORTIONAL)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    criterion: str = EGALITARIAN
    forest_method: str = SIMPLEX
    split_components: bool = False
    seed: int = 0
    emit_report: bool = True
    emit_trace: bool = False

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.forest_method not in FOREST_METHODS:
            raise ValueError(f"unknown forest method {self.forest_method!r}")


@dataclass
class TraceEvent:
    """Global per-agent utilities after one pipeline step.

    ``present_agents`` is only set for rounding steps; ``baseline`` then
    holds the utilities of the rounding input.
    """

    stage: str
    utilities: tuple[Fraction, ...]
    route: str = SIMPLEX
    component: Optional[int] = None
    allocation: Optional[FractionalAllocation] = None
    present_agents: Optional[frozenset] = None
    baseline: Optional[tuple[Fraction, ...]] = None


@dataclass
class RouteStats:
    route: str
    components: int = 1
    initial_edges: int = 0
    forest_iterations: int = 0
    forest_edge_bound_ok: bool = True
    acyclic_after_easy_edges: bool = True
    forest_acyclic: bool = True
    rounding_steps: int = 0


@dataclass
class Component:
    agents: list[int]
    objects: list[int]
    instance: Instance
    allocation: FractionalAllocation


@dataclass
class PipelineResult:
    allocation: DiscreteAllocation
    report: FairnessReport
    seed_allocation: FractionalAllocation
    forest_allocation: FractionalAllocation
    egalitarian_value: Optional[Fraction]
    stats: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    alternate: Optional["PipelineResult"] = None

    @property
    def certificates(self) -> dict:
        results = [self] + ([self.alternate] if self.alternate is not None else [])
        return {
            "fpo": all(r.report.fpo_certified for r in results),
            "up_to_one": all(r.report.up_to_one for r in results),
        }

    @property
    def passed(self) -> bool:
        return all(self.certificates.values())

    def __iter__(self):
        # Unpacks as (allocation, report).
        return iter((self.allocation, self.report))


def split_components(instance: Instance, y: FractionalAllocation) -> list[Component]:
    """One self-contained sub-problem per connected component of ``y``'s graph."""
    graph = build_consumption_graph(y)
    out = []
    for agents, objects in graph.components():
        sub = instance.sub_instance(agents, objects)
        shares = tuple(tuple(y.share(i, o) for o in objects) for i in agents)
        out.append(Component(agents, objects, sub, FractionalAllocation(shares)))
    return out


def _embed(target: list[list[Fraction]], comp: Component, sub: FractionalAllocation) -> None:
    for a, i in enumerate(comp.agents):
        for b, o in enumerate(comp.objects):
            target[i][o] = sub.share(a, b)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - re-raised with stage context
        raise StageError(name, exc) from exc


def _route(instance, improved, route, config, trace) -> tuple[FractionalAllocation, DiscreteAllocation, RouteStats]:
    stats = RouteStats(route)
    n, m = instance.n, instance.m
    if config.split_components:
        comps = _stage("split_components", split_components, instance, improved)
    else:
        comps = [Component(list(range(n)), list(range(m)), instance, improved)]
    stats.components = len(comps)

    forest_global = improved.to_lists()
    owner = [0] * m
    current = list(utilities(instance, improved))
    for c, comp in enumerate(comps):
        easy = _stage("remove_easy_edges", remove_easy_edges, comp.instance, comp.allocation)
        if find_cycle(build_consumption_graph(easy)) is not None:
            stats.acyclic_after_easy_edges = False
        ftrace = ForestTrace()
        forest = _stage("to_forest", to_forest, comp.instance, comp.allocation, ftrace)
        stats.initial_edges += ftrace.initial_edges
        stats.forest_iterations += ftrace.iterations
        graph = build_consumption_graph(forest)
        if graph.edge_count > comp.instance.n + comp.instance.m - 1:
            stats.forest_edge_bound_ok = False
        if find_cycle(graph) is not None:
            stats.forest_acyclic = False
        if config.emit_trace:
            for step in ftrace.steps:
                for a, i in enumerate(comp.agents):
                    current[i] = step.utilities[a]
                snapshot = [row[:] for row in forest_global]
                _embed(snapshot, comp, step.allocation)
                trace.append(TraceEvent(step.stage, tuple(current), route, c,
                                        FractionalAllocation(tuple(map(tuple, snapshot)))))
        _embed(forest_global, comp, forest)
        for a, i in enumerate(comp.agents):
            current[i] = utilities(comp.instance, forest)[a]

        rtrace = RoundingTrace() if config.emit_trace else None
        z = _stage("round_allocation", round_allocation, comp.instance, forest, rtrace)
        stats.rounding_steps += comp.instance.n + comp.instance.m
        if rtrace is not None:
            baseline = tuple(current)
            running = list(current)
            for step in rtrace.steps:
                for a, i in enumerate(comp.agents):
                    running[i] = step.utilities[a]
                present = frozenset(comp.agents[a] for a in step.present_agents)
                trace.append(TraceEvent("round_step", tuple(running), route, c,
                                        present_agents=present, baseline=baseline))
        for b, o in enumerate(comp.objects):
            owner[o] = comp.agents[z.owner[b]]

    forest_alloc = FractionalAllocation(tuple(map(tuple, forest_global)))
    if config.emit_trace:
        trace.append(TraceEvent("forest", utilities(instance, forest_alloc), route,
                                allocation=forest_alloc))
    return forest_alloc, DiscreteAllocation(tuple(owner), n), stats


def run_pipeline(instance: Instance, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Compute an fPO allocation fair up to one object and audit it.

    The result unpacks as ``(allocation, report)``; the full record adds
    stage statistics and, with ``emit_trace``, per-step utilities.
    """
    n, m = instance.n, instance.m
    trace: list[TraceEvent] = []

    if config.criterion == EGALITARIAN:
        seed, z_value = _stage("seed", egalitarian_fractional, instance)
    else:
        seed, z_value = _stage("seed", proportional_fractional, instance), None
    if config.emit_trace:
        trace.append(TraceEvent("seed", utilities(instance, seed), allocation=seed))

    if n == 1:
        alloc = DiscreteAllocation((0,) * m, 1)
        report = _stage("audit", audit, instance, seed, alloc, config.criterion,
                        egalitarian_value=z_value)
        full = alloc.to_fractional()
        if config.emit_trace:
            trace.append(TraceEvent("round", utilities(instance, alloc), allocation=full))
        return PipelineResult(alloc, report, seed, full, z_value,
                              [RouteStats(SIMPLEX, initial_edges=m, rounding_steps=1 + m)], trace)

    routes = [SIMPLEX, ITERATIVE] if config.forest_method == BOTH else [config.forest_method]
    results = []
    for route in routes:
        route_trace: list[TraceEvent] = []
        if route == SIMPLEX:
            improved = _stage("pareto_improve", pareto_improve, instance, seed)
        else:
            improved = _stage("pareto_improve", pareto_improve_blend, instance, seed)
        if config.emit_trace:
            route_trace.append(TraceEvent("pareto_improve", utilities(instance, improved), route,
                                          allocation=improved))
        forest, alloc, stats = _route(instance, improved, route, config, route_trace)
        report = _stage("audit", audit, instance, seed, alloc, config.criterion,
                        egalitarian_value=z_value)
        if config.emit_trace:
            route_trace.append(TraceEvent("round", utilities(instance, alloc), route,
                                          allocation=alloc.to_fractional()))
        results.append(PipelineResult(alloc, report, seed, forest, z_value, [stats], route_trace))
        logger.info("route %s: %d forest iterations, certificates fpo=%s up_to_one=%s", route,
                    stats.forest_iterations, report.fpo_certified, report.up_to_one)

    main = results[0]
    main.trace = trace + main.trace
    if len(results) > 1:
        main.alternate = results[1]
        main.stats = main.stats + results[1].stats
        main.trace = main.trace + results[1].trace
    return main


def generate_instance(kind: str, n: int, m: int, value_range=(1, 10), seed: int = 0) -> Instance:
    """Random integer instance; the same arguments always give the same instance.

    ``goods`` draws from the positive part of the range, ``chores`` from the
    negative part, ``mixed`` from the whole range, and ``partition_hard``
    gives every agent the same positive row.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    lo, hi = value_range
    if lo > hi:
        raise ValueError("empty value range")
    rng = random.Random(seed)
    if kind in ("goods", "partition_hard"):
        lo, hi = max(lo, 1), hi
    elif kind == "chores":
        lo, hi = lo, min(hi, -1)
    elif kind != "mixed":
        raise ValueError(f"unknown instance kind {kind!r}")
    if lo > hi:
        raise ValueError(f"value range has no entries of the sign {kind} needs")
    if kind == "partition_hard":
        row = [rng.randint(lo, hi) for _ in range(m)]
        rows = [list(row) for _ in range(n)]
    else:
        rows = [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]
    return Instance.from_matrix(rows)


def generate_block_instance(blocks: int, agents_per_block: int, objects_per_block: int,
                            value_range=(1, 5), seed: int = 0) -> Instance:
    """Block-diagonal goods with chores off the diagonal.

    Every object is a good only inside its own block, so fPO allocations
    keep blocks apart and the consumption graph splits into components.
    """
    rng = random.Random(seed)
    lo, hi = value_range
    n, m = blocks * agents_per_block, blocks * objects_per_block
    rows = []
    for i in range(n):
        bi = i // agents_per_block
        rows.append([rng.randint(lo, hi) if o // objects_per_block == bi else -rng.randint(lo, hi)
                     for o in range(m)])
    return Instance.from_matrix(rows)
