"""Smoke tests for the bundled illustrative regional fixtures.

These pin the fixtures' behaviour as regression anchors; the edge lists are
hand-built reconstructions, not measured data.
"""

import pytest

from levers import analyze, fixtures, structural_controllability_rank


@pytest.fixture(scope="module")
def nonlocal_report():
    return analyze(fixtures.load("humber_nonlocal"))


@pytest.fixture(scope="module")
def local_report():
    return analyze(fixtures.load("humber_local"))


def test_fixtures_flagged_illustrative():
    for name in ("humber_nonlocal", "humber_local"):
        assert fixtures.load(name).metadata.get("illustrative") is True


def test_nonlocal_shape(nonlocal_report):
    report = nonlocal_report
    assert len(report.configurations) == 6
    assert all(len(c.members) == report.d == 6 for c in report.configurations)
    named = frozenset({"habitat", "inst", "infra", "flood", "landfeed", "know"})
    assert named in {c.members for c in report.configurations}


def test_nonlocal_frequencies_follow_narrative(nonlocal_report):
    freq = nonlocal_report.frequencies
    assert freq["flood"] > freq["landfeed"]
    assert freq["flood"] == len(nonlocal_report.configurations)


def test_local_shape(local_report):
    report = local_report
    assert len(report.configurations) == 3
    assert all(len(c.members) == report.d == 5 for c in report.configurations)
    assert report.frequencies["landfeed"] == 0
    best = frozenset({"know", "infra", "flood", "habitat", "inst"})
    assert best in {c.members for c in report.configurations}


def test_internal_consistency(nonlocal_report, local_report):
    for report in (nonlocal_report, local_report):
        total = len(report.configurations)
        for fid, count in report.frequencies.items():
            assert (count == 0) == (fid in report.classification.never)
            assert (count == total) == (fid in report.classification.always)


def test_configurations_fully_steer_the_network(nonlocal_report):
    graph = nonlocal_report.graph
    n = len(graph.factors)
    for config in nonlocal_report.configurations:
        assert config.warnings == frozenset()
        assert structural_controllability_rank(graph, config.members) == n
