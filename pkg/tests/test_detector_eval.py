from __future__ import annotations

import math
from datetime import datetime, timedelta

import pytest
from hypothesis import given
from hypothesis import strategies as st

from entropy_eads.detector_eval import (
    Combinator,
    DecisionRule,
    EntropyPoint,
    GroundTruth,
    NodeSummary,
    compare,
    decide,
    entropy_points,
    evaluate_summaries,
    summarize,
    summarize_node,
)
from entropy_eads.errors import ConfigurationError
from entropy_eads.ibrl_ingest import load_dataset, load_text
from entropy_eads.windowing import WindowSpec

BOTH = DecisionRule()
EITHER = DecisionRule(combinator=Combinator.EITHER_EXCEEDS)
SPEC = WindowSpec(datetime(2004, 3, 1), datetime(2004, 3, 1, 4))


def pt(h_temp, h_hum, node=1, idx=0):
    return EntropyPoint(node, idx, h_temp, h_hum, 7, 7, 0, 0)


def test_decide_examples():
    assert decide(pt(0.8451, 0.8451), BOTH)
    assert not decide(pt(0.0, 0.0), BOTH)
    assert not decide(pt(0.4515, 0.0), BOTH)
    assert decide(pt(0.4515, 0.0), EITHER)


def test_rule_validation():
    with pytest.raises(ValueError):
        DecisionRule(tau=-0.1)
    with pytest.raises(ValueError):
        DecisionRule(tau=math.inf)


hs = st.floats(0.0, 2.0)


@given(hs, hs, st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_monotone_in_tau(ht, hh, t1, t2):
    lo, hi = sorted((t1, t2))
    for comb in Combinator:
        if decide(pt(ht, hh), DecisionRule(hi, comb)):
            assert decide(pt(ht, hh), DecisionRule(lo, comb))


@given(hs, hs, st.floats(0.0, 2.0))
def test_both_subset_of_either(ht, hh, tau):
    if decide(pt(ht, hh), DecisionRule(tau, Combinator.BOTH_EXCEED)):
        assert decide(pt(ht, hh), DecisionRule(tau, Combinator.EITHER_EXCEEDS))


def _node(flagged, total=24, node=3):
    return [pt(0.5, 0.5, node, i) if i < flagged else pt(0.0, 0.0, node, i) for i in range(total)]


@pytest.mark.parametrize("k", [24, 0, 5])
def test_summarize_node(k):
    s = summarize_node(_node(k))
    assert (s.windows_flagged, s.windows_total, s.flagged) == (k, 24, k >= 1)


def test_summarize_node_empty_and_mixed():
    assert summarize_node([]) is None
    with pytest.raises(ConfigurationError):
        summarize_node([pt(0, 0, 1), pt(0, 0, 2)])


def test_summary_ignores_window_order():
    pts = _node(5)
    assert summarize(pts) == summarize(list(reversed(pts)))


def test_evaluate():
    sums = {
        37: NodeSummary(37, 24, 24),
        14: NodeSummary(14, 6, 24),
        1: NodeSummary(1, 0, 24),
        2: NodeSummary(2, 3, 24),
    }
    conf = evaluate_summaries(sums)
    assert conf.tp == {37, 14} and conf.tn == {1} and conf.fp == {2} and conf.fn == set()
    assert conf.full_coverage_ok
    sums[37] = NodeSummary(37, 23, 24)
    assert evaluate_summaries(sums).incomplete_full_coverage == {37}


def test_ground_truth_disjoint():
    with pytest.raises(ValueError):
        GroundTruth(frozenset({1}), frozenset({1}))


def test_compare_difference():
    sums = {37: NodeSummary(37, 24, 24), 14: NodeSummary(14, 6, 24), 1: NodeSummary(1, 0, 24)}
    rep = compare(sums, {37: [True, False], 14: [False], 1: [False, False]})
    assert rep.entropy_flagged_nodes == {14, 37}
    assert rep.ellipse_flagged_nodes == {37}
    assert rep.entropy_only == {14} and rep.ellipse_only == set()
    assert rep.ellipse_points[37] == (1, 2)


def test_compare_identical_and_mismatch():
    sums = {1: NodeSummary(1, 2, 24)}
    rep = compare(sums, {1: [True]})
    assert rep.entropy_only == set() == rep.ellipse_only
    with pytest.raises(ConfigurationError):
        compare(sums, {2: [True]})


def _clean_text():
    lines = []
    for m in range(120):
        ts = datetime(2004, 3, 1) + timedelta(minutes=m)
        for node in (1, 2, 3):
            t = 16.5 + 0.3 * math.sin(m + node)
            h = 44.0 + 0.5 * math.cos(0.7 * m + node)
            lines.append(f"{ts:%Y-%m-%d %H:%M:%S} {m} {node} {t:.4f} {h:.4f}")
    return "\n".join(lines) + "\n"


def test_all_in_range_flags_nothing():
    from entropy_eads.cli import node_points
    from entropy_eads.elliptical_baseline import classify_point, fit

    ds = load_text(_clean_text())
    sums = summarize(entropy_points(ds, SPEC))
    per_node = node_points(ds)
    m = fit([p for pts in per_node.values() for _, p in pts])
    rep = compare(sums, {n: [classify_point(p, m) for _, p in pts] for n, pts in per_node.items()})
    assert rep.entropy_flagged_nodes == set() == rep.ellipse_flagged_nodes


def test_entropy_points_on_fixture(synthetic_path):
    points = entropy_points(load_dataset(synthetic_path), SPEC)
    by_node = summarize(points)
    assert by_node[37].windows_flagged == 24
    assert 0 < by_node[14].windows_flagged < 24
    for p in points:
        assert 0 <= p.h_temp <= math.log10(p.n_temp) + 1e-12
        assert 0 <= p.h_hum <= math.log10(p.n_hum) + 1e-12
        assert p.violations_temp <= p.n_temp and p.violations_hum <= p.n_hum


def test_window_missing_one_series_is_skipped():
    text = "2004-03-01 00:01:00 1 9 17.0\n2004-03-01 00:11:00 2 9 17.0 44.0\n"
    points = entropy_points(load_text(text), SPEC)
    assert [(p.node_id, p.window_index) for p in points] == [(9, 1)]
