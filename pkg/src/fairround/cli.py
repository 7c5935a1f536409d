"""Command-line front end: ``fairround solve|generate|audit|oracle``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from . import io
from .lp import egalitarian_fractional, proportional_fractional
from .oracle import DEFAULT_LIMIT, EGALITARIAN, PROPORTIONAL, EnumerationTooLarge, audit, brute_force_egalitarian
from .pipeline import FOREST_METHODS, SIMPLEX, PipelineConfig, StageError, generate_instance, run_pipeline

logger = logging.getLogger("fairround")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _trace_to_list(instance, events) -> list:
    out = []
    for ev in events:
        item = {
            "stage": ev.stage,
            "route": ev.route,
            "component": ev.component,
            "utilities": {instance.agents[i]: io.fmt(u) for i, u in enumerate(ev.utilities)},
        }
        if ev.allocation is not None:
            item["allocation"] = io.shares_to_list(ev.allocation)
        if ev.present_agents is not None:
            item["present_agents"] = [instance.agents[i] for i in sorted(ev.present_agents)]
            item["baseline"] = {instance.agents[i]: io.fmt(u) for i, u in enumerate(ev.baseline)}
        out.append(item)
    return out


def result_document(instance, result, config: PipelineConfig) -> dict:
    doc = {
        "allocation": io.allocation_to_dict(instance, result.allocation),
        "report": io.report_to_dict(result.report),
        "certificates": result.certificates,
    }
    if config.emit_trace:
        doc["stats"] = [dataclasses.asdict(s) for s in result.stats]
        doc["trace"] = _trace_to_list(instance, result.trace)
    return doc


def cmd_solve(args) -> int:
    instance = io.parse_instance(_read(args.input))
    config = PipelineConfig(criterion=args.criterion, forest_method=args.forest_method,
                            split_components=args.split_components, emit_trace=args.trace)
    try:
        result = run_pipeline(instance, config)
    except StageError as exc:
        logger.error("%s", exc)
        return 2
    _write(io.dumps(result_document(instance, result, config)), args.output)
    return 0 if result.passed else 1


def cmd_generate(args) -> int:
    try:
        lo, hi = (int(v) for v in args.range.split(":"))
    except ValueError:
        raise SystemExit(f"--range must look like LO:HI, got {args.range!r}")
    instance = generate_instance(args.kind, args.agents, args.objects, (lo, hi), args.seed)
    _write(io.serialize_instance(instance), args.output)
    return 0


def cmd_audit(args) -> int:
    instance = io.parse_instance(_read(args.input))
    z = io.allocation_from_dict(instance, json.loads(_read(args.allocation)))
    if args.criterion == EGALITARIAN:
        baseline, z_value = egalitarian_fractional(instance)
    else:
        baseline, z_value = proportional_fractional(instance), None
    report = audit(instance, baseline, z, args.criterion, egalitarian_value=z_value)
    doc = {
        "report": io.report_to_dict(report),
        "certificates": {"fpo": report.fpo_certified, "up_to_one": report.up_to_one},
    }
    _write(io.dumps(doc), args.output)
    return 0 if report.passed else 1


def cmd_oracle(args) -> int:
    instance = io.parse_instance(_read(args.input))
    try:
        z, value = brute_force_egalitarian(instance, args.limit)
    except EnumerationTooLarge as exc:
        logger.error("%s", exc)
        return 2
    _, lp_value = egalitarian_fractional(instance)
    doc = {
        "allocation": io.allocation_to_dict(instance, z),
        "value": io.fmt(value),
        "egalitarian_lp_value": io.fmt(lp_value),
        "certificates": {"relaxation_bound": value <= lp_value},
    }
    _write(io.dumps(doc), args.output)
    return 0 if value <= lp_value else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairround", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute and certify an allocation")
    p.add_argument("--input", required=True)
    p.add_argument("--criterion", choices=[EGALITARIAN, PROPORTIONAL], default=EGALITARIAN)
    p.add_argument("--forest-method", choices=FOREST_METHODS, default=SIMPLEX)
    p.add_argument("--split-components", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--kind", choices=["goods", "chores", "mixed", "partition_hard"], required=True)
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--objects", type=int, required=True)
    p.add_argument("--range", default="1:10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("audit", help="certify a given allocation")
    p.add_argument("--input", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--criterion", choices=[EGALITARIAN, PROPORTIONAL], default=EGALITARIAN)
    p.add_argument("--output")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("oracle", help="exhaustive discrete egalitarian optimum")
    p.add_argument("--input", required=True)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except io.InstanceParseError as exc:
        logger.error("invalid input: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
