"""JSON documents for instances, allocations and reports.

Rationals are written as strings (``"3"``, ``"-3/7"``) so nothing is lost.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .core import DiscreteAllocation, Instance, StructuralError, to_rational
from .oracle import FairnessReport


class InstanceParseError(ValueError):
    pass


def fmt(q) -> str:
    return None if q is None else str(Fraction(q))


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc)


def instance_from_dict(doc) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceParseError("instance document must be a JSON object")
    for key in ("agents", "objects", "valuations"):
        if key not in doc:
            raise InstanceParseError(f"missing field {key!r}")
    agents, objects, rows = doc["agents"], doc["objects"], doc["valuations"]
    for key, names in (("agents", agents), ("objects", objects)):
        if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
            raise InstanceParseError(f"field {key!r} must be a list of strings")
        if len(set(names)) != len(names):
            dup = next(s for s in names if names.count(s) > 1)
            raise InstanceParseError(f"duplicate name {dup!r} in {key!r}")
    if not isinstance(rows, list) or len(rows) != len(agents):
        raise InstanceParseError(f"'valuations' must have one row per agent ({len(agents)})")
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(objects):
            raise InstanceParseError(f"valuations[{i}] must have {len(objects)} entries")
        out = []
        for o, v in enumerate(row):
            if isinstance(v, float) or isinstance(v, bool):
                raise InstanceParseError(
                    f"valuations[{i}][{o}]: write non-integers as strings (\"0.25\" or \"1/4\")")
            try:
                out.append(to_rational(v))
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise InstanceParseError(f"valuations[{i}][{o}]: {exc}") from None
        parsed.append(out)
    try:
        return Instance(tuple(agents), tuple(objects), parsed)
    except StructuralError as exc:
        raise InstanceParseError(str(exc)) from None


def instance_to_dict(instance: Instance) -> dict:
    return {
        "agents": list(instance.agents),
        "objects": list(instance.objects),
        "valuations": [[fmt(v) for v in row] for row in instance.valuations],
    }


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def allocation_to_dict(instance: Instance, z: DiscreteAllocation) -> dict:
    return {instance.objects[o]: instance.agents[a] for o, a in enumerate(z.owner)}


def allocation_from_dict(instance: Instance, doc) -> DiscreteAllocation:
    """Accepts a bare ``{object: agent}`` map or a solve output with an "allocation" key."""
    if isinstance(doc, dict) and isinstance(doc.get("allocation"), dict):
        doc = doc["allocation"]
    if not isinstance(doc, dict):
        raise InstanceParseError("allocation must be a JSON object mapping objects to agents")
    agent_index = {a: i for i, a in enumerate(instance.agents)}
    owner = []
    for name in instance.objects:
        if name not in doc:
            raise InstanceParseError(f"object {name!r} has no owner")
        if doc[name] not in agent_index:
            raise InstanceParseError(f"object {name!r} owned by unknown agent {doc[name]!r}")
        owner.append(agent_index[doc[name]])
    extra = set(doc) - set(instance.objects)
    if extra:
        raise InstanceParseError(f"unknown objects in allocation: {sorted(extra)}")
    return DiscreteAllocation(tuple(owner), instance.n)


def report_to_dict(report: FairnessReport) -> dict:
    return {
        "mode": report.mode,
        "egalitarian_value": fmt(report.egalitarian_value),
        "brute_force_value": fmt(report.brute_force_value),
        "fpo_certified": report.fpo_certified,
        "agents": [
            {
                "agent": a.agent,
                "baseline": fmt(a.baseline),
                "achieved": fmt(a.achieved),
                "deficit": fmt(a.deficit),
                "max_abs_object": fmt(a.max_abs_object),
                "up_to_one_satisfied": a.up_to_one_satisfied,
            }
            for a in report.agents
        ],
    }


def shares_to_list(alloc) -> list:
    return [[fmt(x) for x in row] for row in alloc.to_fractional().shares]


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"
