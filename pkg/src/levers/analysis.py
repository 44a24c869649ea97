"""Ease-of-control scoring, ranking, and comparison of analysis results.

Configuration structure depends only on the graph; controllability labels
only move scores. That label-invariance is what lets perspectives be
re-ranked instantly without re-running the enumeration.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from .controllability import (
    AnalysisReport,
    Budget,
    ControlConfiguration,
    enumerate_configurations,
    with_scores,
)
from .model import Controllability, FcmGraph, Perspective

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ControllabilityScale:
    """Ordinal cost per label; lower totals mean easier configurations."""

    easy: int = 1
    medium: int = 2
    hard: int = 3

    def __post_init__(self):
        if not self.easy < self.medium < self.hard:
            raise ValueError("scale must be strictly increasing with difficulty")

    def of(self, level: Controllability) -> int:
        return {
            Controllability.EASY: self.easy,
            Controllability.MEDIUM: self.medium,
            Controllability.HARD: self.hard,
        }[level]


DEFAULT_SCALE = ControllabilityScale()


def effective_labeling(
    graph: FcmGraph, perspective: Optional[Perspective] = None
) -> dict[str, Controllability]:
    """Graph labels with a perspective's overrides applied on top."""
    labels = {f.id: f.controllability for f in graph.factors}
    if perspective is not None:
        for fid, level in perspective.overrides.items():
            if fid not in labels:
                raise KeyError(f"perspective override for unknown factor {fid!r}")
            labels[fid] = level
    return labels


def score_configuration(
    members: Iterable[str],
    labeling: Mapping[str, Controllability],
    scale: ControllabilityScale = DEFAULT_SCALE,
) -> float:
    """Total ordinal cost of a configuration; lower is easier to control."""
    member_list = sorted(members)
    if not member_list:
        raise ValueError("a configuration must have at least one member")
    total = 0
    for fid in member_list:
        level = labeling.get(fid)
        if level is None:
            logger.warning("no controllability label for %r; assuming medium", fid)
            level = Controllability.MEDIUM
        total += scale.of(level)
    return float(total)


@dataclass(frozen=True)
class RankedConfiguration:
    rank: int
    score: float
    configuration: ControlConfiguration


def rank_configurations(
    report: AnalysisReport,
    perspective: Optional[Perspective] = None,
    scale: ControllabilityScale = DEFAULT_SCALE,
) -> list[RankedConfiguration]:
    """Configurations by ascending score; ties broken by sorted member names."""
    labels = effective_labeling(report.graph, perspective)
    names = {f.id: f.name for f in report.graph.factors}

    def key(config: ControlConfiguration):
        return (
            score_configuration(config.members, labels, scale),
            tuple(sorted(names.get(fid, fid) for fid in config.members)),
        )

    ordered = sorted(report.configurations, key=key)
    return [
        RankedConfiguration(
            rank=i + 1,
            score=score_configuration(c.members, labels, scale),
            configuration=c,
        )
        for i, c in enumerate(ordered)
    ]


def node_frequencies(report: AnalysisReport) -> dict[str, int]:
    """Exact membership counts over the report's configurations.

    Counts over a truncated report only cover the configurations found and
    should be read as approximate.
    """
    counts = {fid: 0 for fid in report.graph.factor_ids}
    for config in report.configurations:
        for fid in config.members:
            counts[fid] += 1
    return counts


def attach_scores(
    report: AnalysisReport,
    perspective: Optional[Perspective] = None,
    scale: ControllabilityScale = DEFAULT_SCALE,
) -> AnalysisReport:
    """Fill every configuration's score under the given labeling."""
    labels = effective_labeling(report.graph, perspective)
    scores = {
        c.members: score_configuration(c.members, labels, scale)
        for c in report.configurations
    }
    return with_scores(report, scores)


def analyze(
    graph: FcmGraph,
    budget: Optional[Budget] = None,
    perspective: Optional[Perspective] = None,
    scale: ControllabilityScale = DEFAULT_SCALE,
    progress=None,
    should_cancel=None,
) -> AnalysisReport:
    """Full pipeline: enumerate configurations, then score them."""
    report = enumerate_configurations(
        graph, budget=budget, progress=progress, should_cancel=should_cancel
    )
    return attach_scores(report, perspective=perspective, scale=scale)


# --- perspective comparison ---------------------------------------------


@dataclass(frozen=True)
class PerspectiveDiff:
    """Where two stakeholder labelings differ and how their rankings react."""

    disagreements: tuple[tuple[str, Controllability, Controllability], ...]
    ranking_a: tuple[RankedConfiguration, ...]
    ranking_b: tuple[RankedConfiguration, ...]
    shared_best: bool


def compare_perspectives(
    graph: FcmGraph,
    p1: Perspective,
    p2: Perspective,
    budget: Optional[Budget] = None,
    scale: ControllabilityScale = DEFAULT_SCALE,
) -> PerspectiveDiff:
    """Diff two perspectives over one graph.

    The configuration sets are identical by construction (labels never feed
    the matching); only labels, scores, and therefore rankings differ.
    """
    labels_a = effective_labeling(graph, p1)
    labels_b = effective_labeling(graph, p2)
    disagreements = tuple(
        (fid, labels_a[fid], labels_b[fid])
        for fid in graph.factor_ids
        if labels_a[fid] != labels_b[fid]
    )
    report = enumerate_configurations(graph, budget=budget)
    ranking_a = tuple(rank_configurations(report, p1, scale))
    ranking_b = tuple(rank_configurations(report, p2, scale))
    shared_best = bool(
        ranking_a
        and ranking_b
        and ranking_a[0].configuration.members == ranking_b[0].configuration.members
    )
    return PerspectiveDiff(
        disagreements=disagreements,
        ranking_a=ranking_a,
        ranking_b=ranking_b,
        shared_best=shared_best,
    )


# --- scenario comparison --------------------------------------------------


@dataclass(frozen=True)
class ScenarioDiff:
    """Structural differences between two analysed scenarios."""

    count_a: int
    count_b: int
    size_a: int
    size_b: int
    only_a: frozenset[str] = field(default_factory=frozenset)
    only_b: frozenset[str] = field(default_factory=frozenset)
    shared: frozenset[str] = field(default_factory=frozenset)


def compare_scenarios(report_a: AnalysisReport, report_b: AnalysisReport) -> ScenarioDiff:
    """Compare configuration counts, sizes, and possible control nodes.

    A factor is a possible control node of a scenario when it appears in at
    least one of its configurations (frequency > 0).
    """
    nodes_a = {fid for fid, count in report_a.frequencies.items() if count > 0}
    nodes_b = {fid for fid, count in report_b.frequencies.items() if count > 0}
    return ScenarioDiff(
        count_a=len(report_a.configurations),
        count_b=len(report_b.configurations),
        size_a=report_a.d,
        size_b=report_b.d,
        only_a=frozenset(nodes_a - nodes_b),
        only_b=frozenset(nodes_b - nodes_a),
        shared=frozenset(nodes_a & nodes_b),
    )


# --- exports ---------------------------------------------------------------


def ranked_csv(ranked: Iterable[RankedConfiguration], graph: FcmGraph) -> str:
    """CSV of a ranking: rank, score, members (semicolon-joined names), warnings."""
    names = {f.id: f.name for f in graph.factors}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["rank", "score", "members", "warnings"])
    for entry in ranked:
        writer.writerow(
            [
                entry.rank,
                entry.score,
                ";".join(sorted(names.get(fid, fid) for fid in entry.configuration.members)),
                ";".join(sorted(entry.configuration.warnings)),
            ]
        )
    return buffer.getvalue()


def perspective_diff_document(diff: PerspectiveDiff) -> dict[str, Any]:
    def ranking_doc(ranking):
        return [
            {
                "rank": r.rank,
                "score": r.score,
                "members": sorted(r.configuration.members),
            }
            for r in ranking
        ]

    return {
        "disagreements": [
            {"factor": fid, "a": a.value, "b": b.value}
            for fid, a, b in diff.disagreements
        ],
        "ranking_a": ranking_doc(diff.ranking_a),
        "ranking_b": ranking_doc(diff.ranking_b),
        "shared_best": diff.shared_best,
    }


def scenario_diff_document(diff: ScenarioDiff) -> dict[str, Any]:
    return {
        "a": {"configurations": diff.count_a, "size": diff.size_a},
        "b": {"configurations": diff.count_b, "size": diff.size_b},
        "only_a": sorted(diff.only_a),
        "only_b": sorted(diff.only_b),
        "shared": sorted(diff.shared),
    }
