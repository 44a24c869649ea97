"""Minimal control configurations of a directed factor graph.

A set of factors is a control configuration when attaching an independent
external input to each member makes the whole network structurally
controllable. For a component whose double cover has a maximum matching of
cardinality m over N nodes, the minimal configurations are exactly the
unmatched-node sets of maximum matchings, each of size N - m; a perfectly
matched component (m == N, e.g. a cycle) instead needs one input that may
attach to any single node.

The enumeration pipeline is: split into weakly connected components, match
each, classify nodes as always/never/sometimes members (polynomial), then
test candidate sets drawn from the "sometimes" pool (exponential in the
worst case, budgeted), and finally combine the per-component lists as a
Cartesian product. Link weights and signs play no role here; only the
structure does.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Any, Callable, Iterable, Mapping, Optional

import numpy as np

from .matching import OracleSizeError, hopcroft_karp, to_bipartite
from .model import (
    FcmGraph,
    Sign,
    detect_self_loops,
    graph_to_document,
    parse_document,
    weakly_connected_components,
)

DEFAULT_MAX_CONFIGS = 10_000
DEFAULT_MAX_MILLIS = 60_000

_ORACLE_MAX_NODES = 12


class SelfLoopsPresentError(ValueError):
    """Controllability analysis rejects graphs with self-loops."""

    def __init__(self, ids: Iterable[str]):
        self.ids = sorted(ids)
        super().__init__(
            "self-loops are not supported by controllability analysis: "
            + ", ".join(self.ids)
        )


class EmptyGraphError(ValueError):
    """Analysis of a graph without factors."""


class EmptyConfigError(ValueError):
    """Rank check invoked with no input nodes."""


class AnalysisCancelledError(RuntimeError):
    """Raised between candidate tests when the caller requests cancellation."""


@dataclass(frozen=True)
class Budget:
    """Limits for the exponential enumeration step.

    ``None`` disables the corresponding limit. Classification always runs to
    completion; only candidate testing and assembly are truncated.
    """

    max_configs: Optional[int] = DEFAULT_MAX_CONFIGS
    max_millis: Optional[int] = DEFAULT_MAX_MILLIS


@dataclass(frozen=True)
class NodeClassification:
    """Partition of factors by configuration membership."""

    always: frozenset[str]
    never: frozenset[str]
    sometimes: frozenset[str]


@dataclass(frozen=True)
class ControlConfiguration:
    """One minimal driver-node set.

    ``warnings`` lists factors not reachable by a directed path from any
    member; a non-empty set means the inputs steer only part of the network
    and further attachments would be needed in practice.
    """

    members: frozenset[str]
    score: float = 0.0
    warnings: frozenset[str] = frozenset()

    def sort_key(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class AnalysisReport:
    """Complete controllability analysis of one graph."""

    graph: FcmGraph
    m: int
    d: int
    classification: NodeClassification
    configurations: tuple[ControlConfiguration, ...]
    frequencies: Mapping[str, int]
    truncated: bool = False
    truncated_reason: Optional[str] = None
    warnings: tuple[str, ...] = ()


# --- component-level matching machinery -------------------------------------


class _Component:
    """Matching state for one weakly connected component."""

    def __init__(self, graph: FcmGraph):
        self.ids = sorted(graph.factor_ids)
        self.n = len(self.ids)
        bg = to_bipartite(graph)
        self.out_adj = bg.out_adjacency()
        self.in_adj: dict[str, list[str]] = {v: [] for v in self.ids}
        for u, v in bg.edges:
            self.in_adj[v].append(u)
        for v in self.in_adj:
            self.in_adj[v].sort()
        matching = hopcroft_karp(bg)
        self.m = matching.cardinality
        self.pair_bottom: dict[str, str] = dict(matching.pairs)
        self.pair_top: dict[str, str] = {t: b for b, t in matching.pairs.items()}
        self.deficiency = self.n - self.m

    def _augment(
        self,
        top: str,
        pair_top: dict[str, str],
        pair_bottom: dict[str, str],
        banned_tops: frozenset[str],
        banned_bottoms: frozenset[str],
        visited: set[str],
    ) -> bool:
        """Kuhn augmenting search from a free top node; mutates on success."""
        for v in self.out_adj[top]:
            if v in banned_bottoms or v in visited:
                continue
            visited.add(v)
            owner = pair_bottom.get(v)
            if owner is None or (
                owner not in banned_tops
                and self._augment(
                    owner, pair_top, pair_bottom, banned_tops, banned_bottoms, visited
                )
            ):
                pair_top[top] = v
                pair_bottom[v] = top
                return True
        return False

    def matched_without_node(self, node: str) -> bool:
        """True when some maximum matching leaves ``node`` unmatched.

        Equivalent to: deleting all in-edges of ``node`` preserves the
        maximum-matching cardinality (the paper-style never-test).
        """
        top = self.pair_bottom.get(node)
        if top is None:
            return True
        pair_top = dict(self.pair_top)
        pair_bottom = dict(self.pair_bottom)
        del pair_top[top]
        del pair_bottom[node]
        return self._augment(
            top, pair_top, pair_bottom, frozenset(), frozenset({node}), set()
        )

    def matchable_via(self, node: str, source: str) -> bool:
        """True when deleting out-edges of ``source`` and in-edges of ``node``
        drops the maximum matching by exactly one.

        That is the condition under which the edge source -> node can be
        forced into a maximum matching, i.e. ``node`` is matched in some
        maximum matching through ``source``.
        """
        removed = 0
        pair_top = dict(self.pair_top)
        pair_bottom = dict(self.pair_bottom)
        freed_tops = []
        t_in = pair_bottom.get(node)
        if t_in is not None:
            del pair_top[t_in]
            del pair_bottom[node]
            removed += 1
            if t_in != source:
                freed_tops.append(t_in)
        b_out = pair_top.get(source)
        if b_out is not None:
            del pair_top[source]
            del pair_bottom[b_out]
            removed += 1
        # A maximum matching must use an out-edge of source or an in-edge of
        # node (otherwise adding source -> node would enlarge it), so at
        # least one matched edge was removed and the modified maximum is
        # either m - 1 or m - 2.
        if removed == 1:
            return True
        banned_tops = frozenset({source})
        banned_bottoms = frozenset({node})
        candidates = freed_tops + [
            t for t in self.ids if t not in pair_top and t != source and t not in freed_tops
        ]
        for top in candidates:
            if self._augment(
                top, pair_top, pair_bottom, banned_tops, banned_bottoms, set()
            ):
                return True
        return False

    def forcing_preserves_matching(self, candidate: Iterable[str]) -> bool:
        """True when deleting all in-edges of ``candidate`` keeps cardinality m.

        Seeds from the stored maximum matching and re-augments each top node
        freed by the deletion; the outcome does not depend on which maximum
        matching was stored.
        """
        pair_top = dict(self.pair_top)
        pair_bottom = dict(self.pair_bottom)
        banned_bottoms = frozenset(candidate)
        freed = []
        for b in sorted(banned_bottoms):
            t = pair_bottom.pop(b, None)
            if t is not None:
                del pair_top[t]
                freed.append(t)
        for top in sorted(freed):
            if not self._augment(
                top, pair_top, pair_bottom, frozenset(), banned_bottoms, set()
            ):
                return False
        return True

    def classify(self) -> NodeClassification:
        """always/never/sometimes membership for this component.

        A perfectly matched component reports every node as "sometimes":
        each singleton is a configuration there, so no node is forced in or
        out. For deficient components a node is "never" when every maximum
        matching keeps it matched, and "always" when no in-neighbour can be
        forced to match it.
        """
        if self.deficiency == 0:
            return NodeClassification(
                always=frozenset(),
                never=frozenset(),
                sometimes=frozenset(self.ids),
            )
        never = set()
        always = set()
        for node in self.ids:
            if not self.matched_without_node(node):
                never.add(node)
                continue
            if not any(self.matchable_via(node, src) for src in self.in_adj[node]):
                always.add(node)
        sometimes = frozenset(set(self.ids) - never - always)
        return NodeClassification(
            always=frozenset(always), never=frozenset(never), sometimes=sometimes
        )


def _components(graph: FcmGraph) -> list[tuple[FcmGraph, _Component]]:
    return [(sub, _Component(sub)) for sub in weakly_connected_components(graph)]


def _check_preconditions(graph: FcmGraph) -> None:
    if not graph.factors:
        raise EmptyGraphError("graph has no factors")
    loops = detect_self_loops(graph)
    if loops:
        raise SelfLoopsPresentError(loops)


# --- public operations -------------------------------------------------------


def classify_nodes(graph: FcmGraph) -> NodeClassification:
    """Classify every factor as always / never / sometimes a configuration member.

    Polynomial: runs matching tests per node and per edge, never the full
    enumeration. Raises SelfLoopsPresentError on graphs with self-loops.
    """
    _check_preconditions(graph)
    always: set[str] = set()
    never: set[str] = set()
    sometimes: set[str] = set()
    for _, comp in _components(graph):
        cls = comp.classify()
        always |= cls.always
        never |= cls.never
        sometimes |= cls.sometimes
    return NodeClassification(
        always=frozenset(always), never=frozenset(never), sometimes=frozenset(sometimes)
    )


def reachability_warnings(graph: FcmGraph, config: Iterable[str]) -> frozenset[str]:
    """Factors with no directed path from any configuration member.

    A non-empty result means the members alone cannot steer the whole
    network (typically an isolated cycle elsewhere) and extra input
    attachments are required.
    """
    adj = graph.out_edges()
    members = [fid for fid in config if fid in adj]
    reached = set(members)
    stack = list(members)
    while stack:
        current = stack.pop()
        for nxt in adj[current]:
            if nxt not in reached:
                reached.add(nxt)
                stack.append(nxt)
    return frozenset(set(graph.factor_ids) - reached)


def is_configuration(graph: FcmGraph, candidate: Iterable[str]) -> bool:
    """Exact membership test for minimal control configurations.

    Per component: a perfectly matched component accepts exactly one member
    (any node); a deficient component accepts exactly deficiency-many
    members whose forced unmatching preserves the maximum matching.
    """
    _check_preconditions(graph)
    candidate_set = set(candidate)
    unknown = candidate_set - set(graph.factor_ids)
    if unknown:
        raise ValueError(f"unknown factor ids: {sorted(unknown)}")
    for sub, comp in _components(graph):
        local = candidate_set & set(comp.ids)
        if comp.deficiency == 0:
            if len(local) != 1:
                return False
        else:
            if len(local) != comp.deficiency:
                return False
            if not comp.forcing_preserves_matching(local):
                return False
    return True


def enumerate_configurations(
    graph: FcmGraph,
    budget: Optional[Budget] = None,
    progress: Optional[Callable[[int], None]] = None,
    should_cancel: Optional[Callable[[], bool]] = None,
) -> AnalysisReport:
    """Enumerate all minimal control configurations, within a budget.

    Classification is always exact. Candidate testing and cross-component
    assembly stop once the budget is exhausted, flagging the report as
    truncated; ``should_cancel`` is consulted between candidate tests and
    aborts the run with AnalysisCancelledError.

    Returns a deterministic report: configurations sorted lexicographically
    by sorted member ids, frequencies covering every factor.
    """
    _check_preconditions(graph)
    budget = budget or Budget()
    started = time.monotonic()
    tested = 0

    def out_of_time() -> bool:
        if budget.max_millis is None:
            return False
        return (time.monotonic() - started) * 1000.0 >= budget.max_millis

    def check_cancelled() -> None:
        if should_cancel is not None and should_cancel():
            raise AnalysisCancelledError("analysis cancelled")

    comps = _components(graph)
    classifications = [comp.classify() for _, comp in comps]
    always = frozenset().union(*(c.always for c in classifications))
    never = frozenset().union(*(c.never for c in classifications))
    sometimes = frozenset().union(*(c.sometimes for c in classifications))
    classification = NodeClassification(always=always, never=never, sometimes=sometimes)

    total_m = sum(comp.m for _, comp in comps)
    total_d = sum(max(comp.deficiency, 1) for _, comp in comps)

    truncated = False
    reason: Optional[str] = None
    per_component: list[list[frozenset[str]]] = []
    for (sub, comp), cls in zip(comps, classifications):
        found: list[frozenset[str]] = []
        if comp.deficiency == 0:
            found = [frozenset({v}) for v in comp.ids]
        elif not truncated:
            base = frozenset(cls.always)
            free_slots = comp.deficiency - len(base)
            assert free_slots >= 0
            pool = sorted(cls.sometimes)
            for combo in combinations(pool, free_slots):
                check_cancelled()
                if out_of_time():
                    truncated = True
                    reason = "time budget exhausted"
                    break
                tested += 1
                if progress is not None:
                    progress(tested)
                if comp.forcing_preserves_matching(combo):
                    found.append(base | frozenset(combo))
                    if (
                        budget.max_configs is not None
                        and len(found) >= budget.max_configs
                    ):
                        truncated = True
                        reason = "configuration budget exhausted"
                        break
        per_component.append(found)

    configs: list[frozenset[str]] = []
    if all(per_component):
        for parts in product(*per_component):
            check_cancelled()
            if budget.max_configs is not None and len(configs) >= budget.max_configs:
                truncated = True
                reason = reason or "configuration budget exhausted"
                break
            if out_of_time() and not truncated:
                truncated = True
                reason = "time budget exhausted"
                break
            configs.append(frozenset().union(*parts))
    elif truncated:
        # Some component never got enumerated; no complete global
        # configuration can be formed from the partial lists.
        configs = []

    configs.sort(key=lambda s: tuple(sorted(s)))
    configurations = tuple(
        ControlConfiguration(
            members=members,
            warnings=reachability_warnings(graph, members),
        )
        for members in configs
    )
    frequencies = {fid: 0 for fid in graph.factor_ids}
    for config in configurations:
        for fid in config.members:
            frequencies[fid] += 1

    return AnalysisReport(
        graph=graph,
        m=total_m,
        d=total_d,
        classification=classification,
        configurations=configurations,
        frequencies=frequencies,
        truncated=truncated,
        truncated_reason=reason,
        warnings=graph.warnings,
    )


def structural_controllability_rank(
    graph: FcmGraph,
    config: Iterable[str],
    samples: int = 3,
    seed: int = 2016,
) -> int:
    """Generic rank of the controllability matrix (B, AB, ..., A^(N-1) B).

    A's nonzero pattern is the transposed adjacency with the link's
    structural sign; B has one column per configuration member with a single
    nonzero in that member's row. Each nonzero magnitude is sampled
    uniformly from [0.5, 1.5] and the numeric rank is taken at a relative
    singular-value tolerance of 1e-9; the best of ``samples`` independent
    draws is returned (the generic rank is attained with probability 1).
    """
    members = sorted(set(config))
    if not members:
        raise EmptyConfigError("configuration must contain at least one factor")
    ids = graph.factor_ids
    index = {fid: i for i, fid in enumerate(ids)}
    unknown = [fid for fid in members if fid not in index]
    if unknown:
        raise ValueError(f"unknown factor ids: {unknown}")
    n = len(ids)
    pattern = [
        (index[e.target], index[e.source], -1.0 if e.sign is Sign.NEGATIVE else 1.0)
        for e in graph.influences
    ]
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(max(1, samples)):
        a = np.zeros((n, n))
        for row, col, sign in pattern:
            a[row, col] = sign * rng.uniform(0.5, 1.5)
        b = np.zeros((n, len(members)))
        for j, fid in enumerate(members):
            b[index[fid], j] = rng.uniform(0.5, 1.5)
        blocks = [b]
        current = b
        for _ in range(n - 1):
            current = a @ current
            blocks.append(current)
        ctrl = np.hstack(blocks)
        singular = np.linalg.svd(ctrl, compute_uv=False)
        if singular.size and singular[0] > 0:
            rank = int(np.sum(singular > singular[0] * 1e-9))
        else:
            rank = 0
        best = max(best, rank)
    return best


# --- independent test oracle -------------------------------------------------


def _covering_sets(ids: list[str], in_adj: Mapping[str, list[str]]) -> list[frozenset[str]]:
    """All minimal driver sets of one component, by exhaustive subset search.

    A subset S qualifies when every node outside S can be matched by a
    distinct in-neighbour (checked by a self-contained augmenting search);
    the smallest size with any qualifying subset is the configuration size.
    Perfectly matched components qualify every singleton.
    """
    top_index = {fid: i for i, fid in enumerate(ids)}
    in_masks = {
        fid: sum(1 << top_index[src] for src in in_adj[fid]) for fid in ids
    }

    def all_covered(targets: tuple[str, ...]) -> bool:
        owner: dict[int, str] = {}

        def claim(bottom: str, visited: set[int]) -> bool:
            mask = in_masks[bottom]
            while mask:
                bit = mask & -mask
                mask &= mask - 1
                top = bit.bit_length() - 1
                if top in visited:
                    continue
                visited.add(top)
                if top not in owner or claim(owner[top], visited):
                    owner[top] = bottom
                    return True
            return False

        return all(claim(b, set()) for b in targets)

    for size in range(1, len(ids) + 1):
        found = [
            frozenset(subset)
            for subset in combinations(ids, size)
            if all_covered(tuple(fid for fid in ids if fid not in subset))
        ]
        if found:
            return found
    return [frozenset(ids)]


def brute_force_configurations(graph: FcmGraph) -> list[ControlConfiguration]:
    """Exhaustive reference enumeration for graphs of at most 12 factors.

    Independent of the production path: exhaustively tries subsets per
    component, checking with its own augmenting-path search that all
    non-members can be matched simultaneously, then combines components as a
    Cartesian product.
    """
    _check_preconditions(graph)
    if len(graph.factors) > _ORACLE_MAX_NODES:
        raise OracleSizeError(
            f"brute-force enumeration limited to {_ORACLE_MAX_NODES} factors, "
            f"got {len(graph.factors)}"
        )
    component_sets: list[list[frozenset[str]]] = []
    for sub in weakly_connected_components(graph):
        ids = sorted(sub.factor_ids)
        in_adj: dict[str, list[str]] = {fid: [] for fid in ids}
        for e in sub.influences:
            in_adj[e.target].append(e.source)
        component_sets.append(_covering_sets(ids, in_adj))

    combined = [
        frozenset().union(*parts) for parts in product(*component_sets)
    ]
    combined.sort(key=lambda s: tuple(sorted(s)))
    return [
        ControlConfiguration(
            members=members, warnings=reachability_warnings(graph, members)
        )
        for members in combined
    ]


# --- report serialization ------------------------------------------------


def report_to_document(report: AnalysisReport) -> dict[str, Any]:
    """Report as a JSON-compatible document with stable ordering."""
    return {
        "schema_version": "1",
        "graph": graph_to_document(report.graph),
        "m": report.m,
        "D": report.d,
        "classification": {
            "always": sorted(report.classification.always),
            "never": sorted(report.classification.never),
            "sometimes": sorted(report.classification.sometimes),
        },
        "configurations": [
            {
                "members": sorted(c.members),
                "score": c.score,
                "warnings": sorted(c.warnings),
            }
            for c in report.configurations
        ],
        "frequencies": {fid: report.frequencies[fid] for fid in sorted(report.frequencies)},
        "truncated": report.truncated,
        "truncated_reason": report.truncated_reason,
        "warnings": list(report.warnings),
    }


def report_to_json(report: AnalysisReport) -> str:
    """Canonical JSON text for a report; byte-stable for identical inputs."""
    return json.dumps(report_to_document(report), indent=2) + "\n"


def report_from_document(document: Mapping[str, Any]) -> AnalysisReport:
    graph = parse_document(document["graph"])
    classification = NodeClassification(
        always=frozenset(document["classification"]["always"]),
        never=frozenset(document["classification"]["never"]),
        sometimes=frozenset(document["classification"]["sometimes"]),
    )
    configurations = tuple(
        ControlConfiguration(
            members=frozenset(raw["members"]),
            score=float(raw.get("score", 0.0)),
            warnings=frozenset(raw.get("warnings", [])),
        )
        for raw in document["configurations"]
    )
    return AnalysisReport(
        graph=graph,
        m=int(document["m"]),
        d=int(document["D"]),
        classification=classification,
        configurations=configurations,
        frequencies={k: int(v) for k, v in document["frequencies"].items()},
        truncated=bool(document["truncated"]),
        truncated_reason=document.get("truncated_reason"),
        warnings=tuple(document.get("warnings", [])),
    )


def parse_report(text: str) -> AnalysisReport:
    return report_from_document(json.loads(text))


def with_scores(report: AnalysisReport, scores: Mapping[frozenset, float]) -> AnalysisReport:
    """Copy of the report with configuration scores filled in."""
    configurations = tuple(
        replace(c, score=scores.get(c.members, c.score)) for c in report.configurations
    )
    return replace(report, configurations=configurations)
