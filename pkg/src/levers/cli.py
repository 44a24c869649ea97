"""Batch command line for analysts; no server required.

Exit codes: 0 success, 1 usage or input error, 2 self-loops present,
3 analysis truncated by budget. Reports written with --out are byte
identical to what the HTTP service persists for the same graph and budget.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .analysis import (
    analyze,
    compare_perspectives,
    compare_scenarios,
    rank_configurations,
    ranked_csv,
)
from .controllability import (
    AnalysisReport,
    Budget,
    SelfLoopsPresentError,
    classify_nodes,
    parse_report,
    report_to_json,
)
from .dynamics import (
    MappingKind,
    MappingSpec,
    iterate_to_fixed_point,
    rank_factors,
    trajectory_csv,
)
from .model import FcmGraph, GraphSchemaError, export_dot, parse_graph

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SELF_LOOPS = 2
EXIT_TRUNCATED = 3


def _load_graph(path: str) -> FcmGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _load_report(path: str) -> AnalysisReport:
    return parse_report(Path(path).read_text(encoding="utf-8"))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _print_classification(graph: FcmGraph, classification) -> None:
    names = {f.id: f.name for f in graph.factors}
    rows = [
        ("always", sorted(classification.always)),
        ("sometimes", sorted(classification.sometimes)),
        ("never", sorted(classification.never)),
    ]
    for label, ids in rows:
        shown = ", ".join(names[fid] for fid in ids) if ids else "-"
        print(f"{label:>9}: {shown}")


def cmd_analyze(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    budget = Budget(max_configs=args.budget_configs, max_millis=args.budget_ms)
    report = analyze(graph, budget=budget)
    text = report_to_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"report written to {args.out}")
    names = {f.id: f.name for f in graph.factors}
    print(
        f"{len(graph.factors)} factors, {len(graph.influences)} influences; "
        f"matching {report.m}, configuration size {report.d}"
    )
    print(f"{len(report.configurations)} minimal control configuration(s)")
    for i, config in enumerate(report.configurations, start=1):
        members = ", ".join(sorted(names[fid] for fid in config.members))
        extra = ""
        if config.warnings:
            extra = f"  [unreachable: {', '.join(sorted(config.warnings))}]"
        print(f"  {i}. {members}  (score {config.score:g}){extra}")
    if report.truncated:
        print(f"truncated: {report.truncated_reason}")
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    classification = classify_nodes(graph)
    _print_classification(graph, classification)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    report = _load_report(args.report)
    perspective = None
    if args.perspective:
        try:
            perspective = report.graph.perspective(args.perspective)
        except KeyError:
            return _fail(f"report graph has no perspective {args.perspective!r}")
    ranked = rank_configurations(report, perspective)
    if args.csv:
        print(ranked_csv(ranked, report.graph), end="")
        return EXIT_OK
    names = {f.id: f.name for f in report.graph.factors}
    for entry in ranked:
        members = ", ".join(sorted(names[fid] for fid in entry.configuration.members))
        print(f"{entry.rank:>3}. score {entry.score:g}  {members}")
    if not ranked:
        print("no configurations in report")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    mapping = MappingSpec(kind=MappingKind(args.mapping), lam=args.lam)
    trajectory = iterate_to_fixed_point(graph, mapping)
    if args.csv:
        Path(args.csv).write_text(trajectory_csv(trajectory, graph), encoding="utf-8")
        print(f"trajectory written to {args.csv}")
    names = {f.id: f.name for f in graph.factors}
    if trajectory.converged:
        fp = trajectory.fixed_point
        print(f"converged after {len(trajectory.states) - 1} steps")
        for fid in rank_factors(fp):
            print(f"  {names[fid]}: {fp.values[fid]:.6f}")
    else:
        print(f"did not converge within {len(trajectory.states) - 1} steps")
    return EXIT_OK


def cmd_compare_scenarios(args: argparse.Namespace) -> int:
    report_a = _load_report(args.report_a)
    report_b = _load_report(args.report_b)
    diff = compare_scenarios(report_a, report_b)
    print(f"A: {diff.count_a} configuration(s) of size {diff.size_a}")
    print(f"B: {diff.count_b} configuration(s) of size {diff.size_b}")
    names_a = {f.id: f.name for f in report_a.graph.factors}
    names_b = {f.id: f.name for f in report_b.graph.factors}
    def show(ids, names):
        return ", ".join(sorted(names.get(fid, fid) for fid in ids)) if ids else "-"
    print(f"control nodes only in A: {show(diff.only_a, names_a)}")
    print(f"control nodes only in B: {show(diff.only_b, names_b)}")
    print(f"shared control nodes: {show(diff.shared, names_a)}")
    return EXIT_OK


def cmd_compare_perspectives(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    try:
        p1 = graph.perspective(args.p1)
        p2 = graph.perspective(args.p2)
    except KeyError as exc:
        return _fail(f"graph has no perspective {exc.args[0]!r}")
    diff = compare_perspectives(graph, p1, p2)
    names = {f.id: f.name for f in graph.factors}
    if diff.disagreements:
        print("disagreements:")
        for fid, a, b in diff.disagreements:
            print(f"  {names[fid]}: {p1.label}={a.value}, {p2.label}={b.value}")
    else:
        print("no label disagreements")
    for label, ranking in ((p1.label, diff.ranking_a), (p2.label, diff.ranking_b)):
        print(f"ranking under {label}:")
        for entry in ranking:
            members = ", ".join(sorted(names[fid] for fid in entry.configuration.members))
            print(f"  {entry.rank}. score {entry.score:g}  {members}")
    print(f"same best configuration: {'yes' if diff.shared_best else 'no'}")
    return EXIT_OK


def cmd_export_dot(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    report = _load_report(args.report) if args.report else None
    print(export_dot(graph, report), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levers",
        description="Minimal control configurations for fuzzy cognitive maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="enumerate and score all minimal control configurations")
    p.add_argument("graph")
    p.add_argument("--budget-configs", type=int, default=Budget().max_configs)
    p.add_argument("--budget-ms", type=int, default=Budget().max_millis)
    p.add_argument("--out", help="write the report JSON here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="always/never/sometimes membership (polynomial)")
    p.add_argument("graph")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rank", help="rank a report's configurations by ease of control")
    p.add_argument("report")
    p.add_argument("--perspective", help="perspective label defined in the graph")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("simulate", help="iterate the map to a fixed point")
    p.add_argument("graph")
    p.add_argument("--mapping", choices=[k.value for k in MappingKind], required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--csv", help="write the trajectory CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare-scenarios", help="diff two analysis reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.set_defaults(func=cmd_compare_scenarios)

    p = sub.add_parser("compare-perspectives", help="diff two stakeholder perspectives")
    p.add_argument("graph")
    p.add_argument("p1")
    p.add_argument("p2")
    p.set_defaults(func=cmd_compare_perspectives)

    p = sub.add_parser("export-dot", help="DOT rendering, optionally shaded by a report")
    p.add_argument("graph")
    p.add_argument("--report")
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(f"no such file: {exc.filename}")
    except GraphSchemaError as exc:
        return _fail(str(exc))
    except SelfLoopsPresentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SELF_LOOPS


if __name__ == "__main__":
    sys.exit(main())
