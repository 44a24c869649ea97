"""Domain model for fuzzy cognitive maps.

A map is a signed, weighted digraph of system factors. Factors carry an
ease-of-control label (traffic-light style: easy/medium/hard), influences
carry a sign (positive/negative/neutral) and an ordinal strength
(weak/medium/strong) that maps onto the numeric weights 0.2/0.5/0.7.

Graphs are immutable values: every constructor normalizes (sorts factors by
id, influences by endpoint pair) and validates, so two structurally equal
graphs compare equal and serialize to identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

SCHEMA_VERSION = "1"


class GraphSchemaError(ValueError):
    """A graph document violates the schema; message carries the element path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class Controllability(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


class Sign(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


class Strength(str, Enum):
    WEAK = "weak"
    MEDIUM = "medium"
    STRONG = "strong"


STRENGTH_WEIGHTS: Mapping[Strength, float] = {
    Strength.WEAK: 0.2,
    Strength.MEDIUM: 0.5,
    Strength.STRONG: 0.7,
}


@dataclass(frozen=True)
class Factor:
    """One system factor (node) of the map."""

    id: str
    name: str
    controllability: Controllability = Controllability.MEDIUM


@dataclass(frozen=True)
class Influence:
    """One directed causal link between two factors."""

    source: str
    target: str
    sign: Sign = Sign.POSITIVE
    strength: Strength = Strength.MEDIUM


@dataclass(frozen=True)
class Perspective:
    """A stakeholder group's controllability overrides, keyed by factor id."""

    label: str
    overrides: Mapping[str, Controllability] = field(default_factory=dict)


@dataclass(frozen=True)
class FcmGraph:
    """Immutable fuzzy cognitive map.

    ``factors`` is sorted by id and ``influences`` by (source, target), so
    equality is structural. ``warnings`` collects non-fatal modelling notes
    (neutral signs, defaulted controllability) and is excluded from equality.
    """

    factors: tuple[Factor, ...]
    influences: tuple[Influence, ...]
    title: str = ""
    scenario: str = ""
    perspectives: tuple[Perspective, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @staticmethod
    def create(
        factors: Iterable[Factor],
        influences: Iterable[Influence] = (),
        title: str = "",
        scenario: str = "",
        perspectives: Iterable[Perspective] = (),
        metadata: Optional[Mapping[str, Any]] = None,
        extra_warnings: Iterable[str] = (),
    ) -> "FcmGraph":
        """Validate, normalize, and build a graph.

        Raises:
            GraphSchemaError: duplicate ids, dangling endpoints, empty names,
                duplicate influence pairs, or an empty factor set.
        """
        factor_list = sorted(factors, key=lambda f: f.id)
        if not factor_list:
            raise GraphSchemaError("factors", "graph must contain at least one factor")
        ids: set[str] = set()
        for i, f in enumerate(factor_list):
            if not f.id:
                raise GraphSchemaError(f"factors[{i}].id", "factor id must be non-empty")
            if f.id in ids:
                raise GraphSchemaError(f"factors[{i}].id", f"duplicate factor id {f.id!r}")
            if not f.name:
                raise GraphSchemaError(f"factors[{i}].name", f"factor {f.id!r} has an empty name")
            ids.add(f.id)

        influence_list = sorted(influences, key=lambda e: (e.source, e.target))
        seen_pairs: set[tuple[str, str]] = set()
        warnings = list(extra_warnings)
        for i, e in enumerate(influence_list):
            if e.source not in ids:
                raise GraphSchemaError(
                    f"influences[{i}].source", f"unknown factor {e.source!r}"
                )
            if e.target not in ids:
                raise GraphSchemaError(
                    f"influences[{i}].target", f"unknown factor {e.target!r}"
                )
            pair = (e.source, e.target)
            if pair in seen_pairs:
                raise GraphSchemaError(
                    f"influences[{i}]",
                    f"duplicate influence {e.source} -> {e.target}",
                )
            seen_pairs.add(pair)
            if e.sign is Sign.NEUTRAL:
                warnings.append(
                    f"influence {e.source} -> {e.target} has neutral sign; "
                    "treated as a positive weight"
                )

        perspective_list = sorted(perspectives, key=lambda p: p.label)
        seen_labels: set[str] = set()
        for i, p in enumerate(perspective_list):
            if p.label in seen_labels:
                raise GraphSchemaError(
                    f"perspectives[{i}].label", f"duplicate perspective {p.label!r}"
                )
            seen_labels.add(p.label)
            for fid in p.overrides:
                if fid not in ids:
                    raise GraphSchemaError(
                        f"perspectives[{i}].overrides.{fid}",
                        f"override for unknown factor {fid!r}",
                    )

        return FcmGraph(
            factors=tuple(factor_list),
            influences=tuple(influence_list),
            title=title,
            scenario=scenario,
            perspectives=tuple(perspective_list),
            metadata=dict(metadata or {}),
            warnings=tuple(warnings),
        )

    @property
    def factor_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.factors)

    def factor(self, factor_id: str) -> Factor:
        for f in self.factors:
            if f.id == factor_id:
                return f
        raise KeyError(factor_id)

    def perspective(self, label: str) -> Perspective:
        for p in self.perspectives:
            if p.label == label:
                return p
        raise KeyError(label)

    def out_edges(self) -> dict[str, list[str]]:
        """Adjacency as source id -> sorted target ids."""
        adj: dict[str, list[str]] = {f.id: [] for f in self.factors}
        for e in self.influences:
            adj[e.source].append(e.target)
        return adj


@dataclass(eq=False)
class WeightMatrix:
    """Dense signed weight matrix with entry (i, j) = weight of influence j -> i.

    Rows and columns are indexed by ``ids`` (factor ids sorted ascending);
    this is the transposed adjacency convention used by the dynamics update.
    """

    values: np.ndarray
    ids: tuple[str, ...]

    def index_of(self, factor_id: str) -> int:
        return self.ids.index(factor_id)


def weight_of(influence: Influence) -> float:
    """Signed numeric weight of a link.

    Strength maps weak/medium/strong to 0.2/0.5/0.7; the sign is -1 for
    negative links and +1 otherwise (neutral links count as positive and are
    flagged as a graph warning at construction time).
    """
    w = STRENGTH_WEIGHTS[influence.strength]
    return -w if influence.sign is Sign.NEGATIVE else w


def adjacency_matrix(graph: FcmGraph) -> WeightMatrix:
    """Weighted transposed adjacency matrix of the graph."""
    ids = graph.factor_ids
    index = {fid: i for i, fid in enumerate(ids)}
    values = np.zeros((len(ids), len(ids)), dtype=float)
    for e in graph.influences:
        values[index[e.target], index[e.source]] = weight_of(e)
    return WeightMatrix(values=values, ids=ids)


def detect_self_loops(graph: FcmGraph) -> list[str]:
    """Ids of factors with an influence onto themselves, sorted."""
    return sorted({e.source for e in graph.influences if e.source == e.target})


def weakly_connected_components(graph: FcmGraph) -> list[FcmGraph]:
    """Split the graph into maximal weakly-connected subgraphs.

    Edge direction is ignored for connectivity. Components are ordered by
    their smallest factor id; each carries only its internal influences and
    perspective overrides restricted to its own factors.
    """
    neighbours: dict[str, set[str]] = {f.id: set() for f in graph.factors}
    for e in graph.influences:
        neighbours[e.source].add(e.target)
        neighbours[e.target].add(e.source)

    seen: set[str] = set()
    components: list[set[str]] = []
    for fid in graph.factor_ids:
        if fid in seen:
            continue
        members = {fid}
        stack = [fid]
        while stack:
            current = stack.pop()
            for nxt in neighbours[current]:
                if nxt not in members:
                    members.add(nxt)
                    stack.append(nxt)
        seen |= members
        components.append(members)

    components.sort(key=min)
    result = []
    for members in components:
        sub_perspectives = [
            Perspective(
                label=p.label,
                overrides={k: v for k, v in p.overrides.items() if k in members},
            )
            for p in graph.perspectives
        ]
        result.append(
            FcmGraph(
                factors=tuple(f for f in graph.factors if f.id in members),
                influences=tuple(
                    e for e in graph.influences if e.source in members
                ),
                title=graph.title,
                scenario=graph.scenario,
                perspectives=tuple(sub_perspectives),
                metadata=dict(graph.metadata),
            )
        )
    return result


# --- JSON document format -------------------------------------------------
#
# {"schema_version": "1", "title": ..., "scenario": ...,
#  "factors": [{"id", "name", "controllability"}],
#  "influences": [{"source", "target", "sign", "strength"}],
#  "perspectives": [{"label", "overrides": {id: level}}],
#  "metadata": {...}}            # free-form, preserved round-trip


def _parse_enum(cls, raw: Any, path: str):
    try:
        return cls(raw)
    except ValueError:
        expected = "|".join(m.value for m in cls)
        raise GraphSchemaError(path, f"unknown value {raw!r} (expected {expected})")


def _require(obj: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise GraphSchemaError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]


def parse_document(document: Mapping[str, Any]) -> FcmGraph:
    """Build a graph from an already-decoded JSON document."""
    if not isinstance(document, Mapping):
        raise GraphSchemaError("", "graph document must be a JSON object")
    version = document.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise GraphSchemaError(
            "schema_version", f"unsupported schema version {version!r}"
        )

    raw_factors = _require(document, "factors", "")
    if not isinstance(raw_factors, Sequence) or isinstance(raw_factors, str):
        raise GraphSchemaError("factors", "must be an array")
    factors = []
    warnings = []
    for i, raw in enumerate(raw_factors):
        path = f"factors[{i}]"
        if not isinstance(raw, Mapping):
            raise GraphSchemaError(path, "must be an object")
        fid = str(_require(raw, "id", path))
        name = str(_require(raw, "name", path))
        if "controllability" in raw:
            level = _parse_enum(
                Controllability, raw["controllability"], f"{path}.controllability"
            )
        else:
            level = Controllability.MEDIUM
            warnings.append(
                f"factor {fid!r} has no controllability; defaulted to medium"
            )
        factors.append(Factor(id=fid, name=name, controllability=level))

    raw_influences = document.get("influences", [])
    if not isinstance(raw_influences, Sequence) or isinstance(raw_influences, str):
        raise GraphSchemaError("influences", "must be an array")
    influences = []
    for i, raw in enumerate(raw_influences):
        path = f"influences[{i}]"
        if not isinstance(raw, Mapping):
            raise GraphSchemaError(path, "must be an object")
        influences.append(
            Influence(
                source=str(_require(raw, "source", path)),
                target=str(_require(raw, "target", path)),
                sign=_parse_enum(Sign, raw.get("sign", "positive"), f"{path}.sign"),
                strength=_parse_enum(
                    Strength, raw.get("strength", "medium"), f"{path}.strength"
                ),
            )
        )

    raw_perspectives = document.get("perspectives", [])
    if not isinstance(raw_perspectives, Sequence) or isinstance(raw_perspectives, str):
        raise GraphSchemaError("perspectives", "must be an array")
    perspectives = []
    for i, raw in enumerate(raw_perspectives):
        path = f"perspectives[{i}]"
        if not isinstance(raw, Mapping):
            raise GraphSchemaError(path, "must be an object")
        overrides_raw = raw.get("overrides", {})
        if not isinstance(overrides_raw, Mapping):
            raise GraphSchemaError(f"{path}.overrides", "must be an object")
        overrides = {
            str(fid): _parse_enum(
                Controllability, level, f"{path}.overrides.{fid}"
            )
            for fid, level in overrides_raw.items()
        }
        perspectives.append(
            Perspective(label=str(_require(raw, "label", path)), overrides=overrides)
        )

    metadata = document.get("metadata", {})
    if not isinstance(metadata, Mapping):
        raise GraphSchemaError("metadata", "must be an object")

    return FcmGraph.create(
        factors=factors,
        influences=influences,
        title=str(document.get("title", "")),
        scenario=str(document.get("scenario", "")),
        perspectives=perspectives,
        metadata=metadata,
        extra_warnings=warnings,
    )


def parse_graph(text: str) -> FcmGraph:
    """Parse a JSON graph document; raises GraphSchemaError on any violation."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSchemaError("", f"invalid JSON: {exc}") from exc
    return parse_document(document)


def graph_to_document(graph: FcmGraph) -> dict[str, Any]:
    """Graph as a JSON-compatible document with stable ordering."""
    return {
        "schema_version": SCHEMA_VERSION,
        "title": graph.title,
        "scenario": graph.scenario,
        "factors": [
            {"id": f.id, "name": f.name, "controllability": f.controllability.value}
            for f in graph.factors
        ],
        "influences": [
            {
                "source": e.source,
                "target": e.target,
                "sign": e.sign.value,
                "strength": e.strength.value,
            }
            for e in graph.influences
        ],
        "perspectives": [
            {
                "label": p.label,
                "overrides": {
                    fid: level.value for fid, level in sorted(p.overrides.items())
                },
            }
            for p in graph.perspectives
        ],
        "metadata": json.loads(json.dumps(graph.metadata, sort_keys=True)),
    }


def serialize_graph(graph: FcmGraph) -> str:
    """Canonical JSON text; parse(serialize(g)) is structurally equal to g."""
    return json.dumps(graph_to_document(graph), indent=2) + "\n"


# --- DOT export -------------------------------------------------------------

_NODE_COLOURS = {
    Controllability.EASY: "green",
    Controllability.MEDIUM: "orange",
    Controllability.HARD: "red",
}
_EDGE_COLOURS = {
    Sign.POSITIVE: "green",
    Sign.NEGATIVE: "red",
    Sign.NEUTRAL: "grey",
}
_EDGE_WIDTHS = {Strength.WEAK: 1.0, Strength.MEDIUM: 2.0, Strength.STRONG: 3.0}


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: FcmGraph, report=None) -> str:
    """Render the graph in DOT format.

    Node outline colour follows the controllability traffic-light scheme,
    edge colour follows the sign and edge width the strength. When an
    analysis report is given, members of its first configuration are filled
    grey and node size scales with configuration frequency.
    """
    members: set[str] = set()
    frequencies: dict[str, int] = {}
    total = 0
    if report is not None:
        if report.configurations:
            members = set(report.configurations[0].members)
        frequencies = dict(report.frequencies)
        total = len(report.configurations)

    lines = ["digraph fcm {"]
    title = graph.title or "fuzzy cognitive map"
    lines.append(f"  label={_dot_quote(title)};")
    lines.append("  node [shape=ellipse];")
    for f in graph.factors:
        attrs = [
            f"label={_dot_quote(f.name)}",
            f"color={_NODE_COLOURS[f.controllability]}",
        ]
        if f.id in members:
            attrs.append("style=filled")
            attrs.append("fillcolor=grey")
        if total and frequencies.get(f.id):
            share = frequencies[f.id] / total
            attrs.append(f"width={0.8 + share:.2f}")
        lines.append(f"  {_dot_quote(f.id)} [{', '.join(attrs)}];")
    for e in graph.influences:
        attrs = [
            f"color={_EDGE_COLOURS[e.sign]}",
            f"penwidth={_EDGE_WIDTHS[e.strength]:.1f}",
        ]
        lines.append(
            f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} [{', '.join(attrs)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
