import random

import pytest
from hypothesis import given, settings

from levers import (
    AnalysisCancelledError,
    Budget,
    EmptyConfigError,
    SelfLoopsPresentError,
    brute_force_configurations,
    classify_nodes,
    enumerate_configurations,
    hopcroft_karp,
    is_configuration,
    reachability_warnings,
    report_to_json,
    structural_controllability_rank,
    to_bipartite,
)
from levers.matching import OracleSizeError

from conftest import digraphs, make_graph, random_digraph


def members_of(report):
    return {c.members for c in report.configurations}


class TestClassify:
    def test_path(self):
        cls = classify_nodes(make_graph([("a", "b"), ("b", "c")]))
        assert cls.always == {"a"}
        assert cls.never == {"b", "c"}
        assert cls.sometimes == frozenset()

    def test_star(self):
        cls = classify_nodes(make_graph([("a", "b"), ("a", "c")]))
        assert cls.always == {"a"}
        assert cls.never == frozenset()
        assert cls.sometimes == {"b", "c"}

    def test_perfectly_matched_component_is_all_sometimes(self):
        cls = classify_nodes(make_graph([("a", "b"), ("b", "a")]))
        assert cls.always == cls.never == frozenset()
        assert cls.sometimes == {"a", "b"}

    def test_self_loops_rejected_with_ids(self):
        with pytest.raises(SelfLoopsPresentError) as err:
            classify_nodes(make_graph([("a", "a"), ("a", "b")]))
        assert err.value.ids == ["a"]


class TestEnumerate:
    def test_path_single_configuration(self):
        report = enumerate_configurations(make_graph([("a", "b"), ("b", "c")]))
        assert members_of(report) == {frozenset({"a"})}
        assert report.d == 1 and report.m == 2

    def test_star_two_configurations(self):
        report = enumerate_configurations(make_graph([("a", "b"), ("a", "c")]))
        assert members_of(report) == {frozenset({"a", "b"}), frozenset({"a", "c"})}
        assert report.d == 2
        assert report.frequencies == {"a": 2, "b": 1, "c": 1}

    def test_cycle_singletons(self):
        report = enumerate_configurations(make_graph([("a", "b"), ("b", "a")]))
        assert members_of(report) == {frozenset({"a"}), frozenset({"b"})}
        assert report.d == 1

    def test_component_product(self):
        graph = make_graph([("x", "y"), ("p", "q"), ("q", "p")])
        report = enumerate_configurations(graph)
        assert members_of(report) == {frozenset({"x", "p"}), frozenset({"x", "q"})}
        assert report.d == 2

    def test_configurations_sorted_lexicographically(self):
        report = enumerate_configurations(make_graph([("a", "b"), ("a", "c")]))
        keys = [tuple(sorted(c.members)) for c in report.configurations]
        assert keys == sorted(keys)

    def test_deterministic_bytes(self):
        graph = random_digraph(random.Random(11), 9, 0.3)
        assert report_to_json(enumerate_configurations(graph)) == report_to_json(
            enumerate_configurations(graph)
        )

    def test_config_budget_truncates_with_exact_classification(self):
        graph = make_graph([("a", "b"), ("a", "c"), ("a", "d"), ("a", "e")])
        full = enumerate_configurations(graph)
        cut = enumerate_configurations(graph, budget=Budget(max_configs=2))
        assert cut.truncated and "budget" in cut.truncated_reason
        assert len(cut.configurations) <= 2
        assert cut.classification == full.classification
        assert members_of(cut) <= members_of(full)

    def test_time_budget_zero_truncates(self):
        graph = make_graph([("a", "b"), ("a", "c")])
        report = enumerate_configurations(graph, budget=Budget(max_millis=0))
        assert report.truncated
        assert report.classification == classify_nodes(graph)

    def test_cancellation_between_candidates(self):
        graph = make_graph([("a", "b"), ("a", "c")])
        calls = iter([False, True, True, True, True])
        with pytest.raises(AnalysisCancelledError):
            enumerate_configurations(graph, should_cancel=lambda: next(calls))

    def test_self_loop_error(self):
        with pytest.raises(SelfLoopsPresentError):
            enumerate_configurations(make_graph([("a", "a")]))


class TestIsConfiguration:
    def test_path_examples(self):
        graph = make_graph([("a", "b"), ("b", "c")])
        assert is_configuration(graph, {"a"})
        assert not is_configuration(graph, {"b"})

    def test_star_rejects_missing_always_member(self):
        graph = make_graph([("a", "b"), ("a", "c")])
        assert not is_configuration(graph, {"b", "c"})
        assert is_configuration(graph, {"a", "b"})

    def test_perfect_component_needs_exactly_one(self):
        graph = make_graph([("a", "b"), ("b", "a")])
        assert is_configuration(graph, {"a"})
        assert not is_configuration(graph, {"a", "b"})

    def test_unknown_id_raises(self):
        with pytest.raises(ValueError, match="unknown factor"):
            is_configuration(make_graph([("a", "b")]), {"zz"})


class TestReachability:
    def test_chain_fully_reached(self):
        graph = make_graph([("a", "b"), ("b", "c")])
        assert reachability_warnings(graph, {"a"}) == frozenset()

    def test_cycle_covered_by_own_member(self):
        graph = make_graph([("a", "b"), ("p", "q"), ("q", "p")])
        assert reachability_warnings(graph, {"a", "p"}) == frozenset()

    def test_unreached_cycle_flagged(self):
        graph = make_graph([("a", "b"), ("p", "q"), ("q", "p")])
        assert reachability_warnings(graph, {"a"}) == {"p", "q"}


class TestRank:
    def test_two_node_chain_full_rank(self):
        assert structural_controllability_rank(make_graph([("a", "b")]), {"a"}) == 2

    def test_isolated_node_not_controlled(self):
        graph = make_graph([], ids=["a", "b"])
        assert structural_controllability_rank(graph, {"a"}) == 1

    def test_dilation_detected(self):
        graph = make_graph([("a", "b"), ("a", "c")])
        assert structural_controllability_rank(graph, {"a"}) == 2

    def test_empty_config_rejected(self):
        with pytest.raises(EmptyConfigError):
            structural_controllability_rank(make_graph([("a", "b")]), set())


class TestBruteForce:
    def test_examples(self):
        assert {c.members for c in brute_force_configurations(make_graph([("a", "b"), ("b", "c")]))} == {
            frozenset({"a"})
        }
        assert {c.members for c in brute_force_configurations(make_graph([("a", "b"), ("a", "c")]))} == {
            frozenset({"a", "b"}),
            frozenset({"a", "c"}),
        }
        assert {c.members for c in brute_force_configurations(make_graph([("a", "b"), ("b", "a")]))} == {
            frozenset({"a"}),
            frozenset({"b"}),
        }

    def test_size_guard(self):
        graph = make_graph([], ids=[f"n{i}" for i in range(13)])
        with pytest.raises(OracleSizeError):
            brute_force_configurations(graph)


class TestProperties:
    @settings(max_examples=120, deadline=None)
    @given(digraphs(max_nodes=10))
    def test_oracle_equivalence(self, graph):
        report = enumerate_configurations(graph, budget=Budget(None, None))
        oracle = brute_force_configurations(graph)
        assert members_of(report) == {c.members for c in oracle}

    @settings(max_examples=80, deadline=None)
    @given(digraphs(max_nodes=10))
    def test_classification_matches_membership(self, graph):
        report = enumerate_configurations(graph, budget=Budget(None, None))
        total = len(report.configurations)
        for fid in graph.factor_ids:
            freq = report.frequencies[fid]
            assert (freq == total) == (fid in report.classification.always)
            assert (freq == 0) == (fid in report.classification.never)

    @settings(max_examples=80, deadline=None)
    @given(digraphs(max_nodes=10))
    def test_size_law(self, graph):
        from levers import weakly_connected_components

        for sub in weakly_connected_components(graph):
            m = hopcroft_karp(to_bipartite(sub)).cardinality
            d = len(sub.factors) - m
            component_report = enumerate_configurations(sub, budget=Budget(None, None))
            if d == 0:
                assert len(component_report.configurations) == len(sub.factors)
                assert all(len(c.members) == 1 for c in component_report.configurations)
            else:
                assert all(
                    len(c.members) == d for c in component_report.configurations
                )

    @settings(max_examples=60, deadline=None)
    @given(digraphs(max_nodes=9))
    def test_forcing_monotonicity(self, graph):
        base = hopcroft_karp(to_bipartite(graph)).cardinality
        for node in graph.factor_ids:
            reduced = make_graph(
                [(e.source, e.target) for e in graph.influences if e.target != node],
                ids=graph.factor_ids,
            )
            assert hopcroft_karp(to_bipartite(reduced)).cardinality in (base, base - 1)

    @settings(max_examples=40, deadline=None)
    @given(digraphs(max_nodes=8))
    def test_rank_coherence(self, graph):
        report = enumerate_configurations(graph, budget=Budget(None, None))
        n = len(graph.factors)
        for config in report.configurations:
            if not config.warnings:
                assert structural_controllability_rank(graph, config.members) == n
