import json

import pytest
from hypothesis import given, settings

from levers import (
    Controllability,
    Factor,
    FcmGraph,
    GraphSchemaError,
    Influence,
    Sign,
    Strength,
    adjacency_matrix,
    detect_self_loops,
    export_dot,
    parse_graph,
    serialize_graph,
    weakly_connected_components,
    weight_of,
)
from levers.analysis import analyze

from conftest import digraphs, make_graph


class TestWeightOf:
    def test_positive_strong(self):
        assert weight_of(Influence("a", "b", Sign.POSITIVE, Strength.STRONG)) == pytest.approx(0.7)

    def test_negative_weak(self):
        assert weight_of(Influence("a", "b", Sign.NEGATIVE, Strength.WEAK)) == pytest.approx(-0.2)

    def test_neutral_counts_positive_and_graph_warns(self):
        assert weight_of(Influence("a", "b", Sign.NEUTRAL, Strength.MEDIUM)) == pytest.approx(0.5)
        graph = FcmGraph.create(
            [Factor("a", "A"), Factor("b", "B")],
            [Influence("a", "b", Sign.NEUTRAL, Strength.MEDIUM)],
        )
        assert any("neutral" in w for w in graph.warnings)


class TestAdjacencyMatrix:
    def test_single_edge_lands_transposed(self):
        graph = make_graph([("a", "b")], signs={("a", "b"): Sign.POSITIVE})
        m = adjacency_matrix(graph)
        i, j = m.index_of("b"), m.index_of("a")
        assert m.values[i, j] == pytest.approx(0.5)
        assert (m.values != 0).sum() == 1

    def test_no_influences_zero_matrix(self):
        graph = make_graph([], ids=["a", "b", "c"])
        assert not adjacency_matrix(graph).values.any()

    def test_reciprocal_pair(self):
        graph = FcmGraph.create(
            [Factor("a", "A"), Factor("b", "B")],
            [
                Influence("a", "b", Sign.POSITIVE, Strength.WEAK),
                Influence("b", "a", Sign.NEGATIVE, Strength.WEAK),
            ],
        )
        m = adjacency_matrix(graph)
        assert m.values[m.index_of("b"), m.index_of("a")] == pytest.approx(0.2)
        assert m.values[m.index_of("a"), m.index_of("b")] == pytest.approx(-0.2)

    @settings(max_examples=60, deadline=None)
    @given(digraphs(self_loops=True))
    def test_nonzero_count_equals_influences(self, graph):
        assert (adjacency_matrix(graph).values != 0).sum() == len(graph.influences)


class TestComponents:
    def test_edge_plus_isolated(self):
        graph = make_graph([("a", "b")], ids=["z"])
        parts = weakly_connected_components(graph)
        assert [p.factor_ids for p in parts] == [("a", "b"), ("z",)]

    def test_chain_is_one_component(self):
        graph = make_graph([("a", "b"), ("b", "c")])
        assert len(weakly_connected_components(graph)) == 1

    def test_direction_ignored(self):
        graph = make_graph([("a", "b"), ("c", "d"), ("d", "c")])
        parts = weakly_connected_components(graph)
        assert [set(p.factor_ids) for p in parts] == [{"a", "b"}, {"c", "d"}]

    @settings(max_examples=60, deadline=None)
    @given(digraphs(self_loops=True))
    def test_partition_property(self, graph):
        parts = weakly_connected_components(graph)
        all_ids = [fid for p in parts for fid in p.factor_ids]
        assert sorted(all_ids) == sorted(graph.factor_ids)
        assert len(all_ids) == len(set(all_ids))
        assert sum(len(p.influences) for p in parts) == len(graph.influences)


class TestSelfLoops:
    def test_loop_detected(self):
        assert detect_self_loops(make_graph([("a", "a"), ("a", "b")])) == ["a"]

    def test_no_loops(self):
        assert detect_self_loops(make_graph([("a", "b")])) == []

    def test_multiple_sorted(self):
        assert detect_self_loops(make_graph([("b", "b"), ("a", "a")])) == ["a", "b"]


class TestParseSerialize:
    def test_round_trip_structural_identity(self):
        graph = make_graph(
            [("a", "b"), ("b", "c")],
            controllability={"a": Controllability.EASY},
        )
        assert parse_graph(serialize_graph(graph)) == graph

    @settings(max_examples=60, deadline=None)
    @given(digraphs(self_loops=True))
    def test_round_trip_property(self, graph):
        assert parse_graph(serialize_graph(graph)) == graph

    def test_unknown_endpoint_names_offender(self):
        doc = {
            "factors": [{"id": "a", "name": "A"}],
            "influences": [{"source": "a", "target": "X"}],
        }
        with pytest.raises(GraphSchemaError, match="'X'"):
            parse_graph(json.dumps(doc))

    def test_duplicate_influence_rejected(self):
        doc = {
            "factors": [{"id": "a", "name": "A"}, {"id": "b", "name": "B"}],
            "influences": [
                {"source": "a", "target": "b"},
                {"source": "a", "target": "b", "sign": "negative"},
            ],
        }
        with pytest.raises(GraphSchemaError, match="duplicate influence"):
            parse_graph(json.dumps(doc))

    def test_duplicate_factor_id_rejected(self):
        doc = {"factors": [{"id": "a", "name": "A"}, {"id": "a", "name": "B"}]}
        with pytest.raises(GraphSchemaError, match=r"factors\[1\]"):
            parse_graph(json.dumps(doc))

    def test_unknown_enum_value_has_path(self):
        doc = {"factors": [{"id": "a", "name": "A", "controllability": "impossible"}]}
        with pytest.raises(GraphSchemaError, match=r"controllability.*impossible"):
            parse_graph(json.dumps(doc))

    def test_missing_controllability_defaults_with_warning(self):
        doc = {"factors": [{"id": "a", "name": "A"}]}
        graph = parse_graph(json.dumps(doc))
        assert graph.factor("a").controllability is Controllability.MEDIUM
        assert any("defaulted" in w for w in graph.warnings)

    def test_empty_name_rejected(self):
        with pytest.raises(GraphSchemaError, match="name"):
            FcmGraph.create([Factor("a", "")])

    def test_empty_graph_rejected(self):
        with pytest.raises(GraphSchemaError, match="at least one factor"):
            FcmGraph.create([])

    def test_invalid_json_reported(self):
        with pytest.raises(GraphSchemaError, match="invalid JSON"):
            parse_graph("{nope")

    def test_unknown_schema_version_rejected(self):
        doc = {"schema_version": "99", "factors": [{"id": "a", "name": "A"}]}
        with pytest.raises(GraphSchemaError, match="schema version"):
            parse_graph(json.dumps(doc))

    def test_metadata_preserved(self):
        doc = {
            "factors": [{"id": "a", "name": "A", "controllability": "easy"}],
            "metadata": {"layout": {"a": {"x": 10, "y": 20}}},
        }
        graph = parse_graph(json.dumps(doc))
        again = parse_graph(serialize_graph(graph))
        assert again.metadata == {"layout": {"a": {"x": 10, "y": 20}}}


class TestDotExport:
    def test_traffic_light_colours(self):
        graph = make_graph(
            [("a", "b")],
            controllability={"a": Controllability.EASY, "b": Controllability.HARD},
        )
        dot = export_dot(graph)
        assert "color=green" in dot and "color=red" in dot

    def test_edge_style_by_sign_and_strength(self):
        graph = FcmGraph.create(
            [Factor("a", "A"), Factor("b", "B")],
            [Influence("a", "b", Sign.NEGATIVE, Strength.STRONG)],
        )
        dot = export_dot(graph)
        assert '"a" -> "b" [color=red, penwidth=3.0];' in dot

    def test_report_members_filled_grey(self):
        graph = make_graph([("a", "b"), ("b", "c")])
        report = analyze(graph)
        dot = export_dot(graph, report)
        member_line = next(line for line in dot.splitlines() if line.startswith('  "a" ['))
        assert "fillcolor=grey" in member_line
        assert "fillcolor=grey" not in export_dot(graph)
