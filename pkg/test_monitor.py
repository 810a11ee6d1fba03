#!/usr/bin/env python3
"""Iteration monitor: per-step conditions and the final bound check."""

import pytest

from core.errors import InvariantViolation
from core.game import Owner
from verification.monitor import (IterationMonitor, MonitorMode, MonitorViolation, finalize, make_record,
                                  record_step, step_bound)

MAX, MIN = Owner.MAX, Owner.MIN
PAIR = {"a": MAX, "b": MIN}
TRIPLE = {"a": MAX, "b": MIN, "c": MAX}


def test_strong_step_raises_both_signatures():
    start = make_record(0, [], PAIR)
    assert start.signature.f == (1, 0, 0) and start.signature.g == (1, 0, 0)
    record = record_step(start, [("a", "b")], MonitorMode.STRONG, PAIR)
    assert record.signature.f == (1, 1, 0)
    assert record.signature.g == (0, 0, 0)
    assert record.evidence == ("a", "b", "strongly_violating")
    assert record.transformed == ((-1, 1), (0, 0))


def test_dropping_an_optimal_edge_is_reported():
    prev = make_record(3, [("a", "b")], PAIR)
    with pytest.raises(MonitorViolation) as excinfo:
        record_step(prev, [], MonitorMode.PLAIN, PAIR)
    assert excinfo.value.condition == "optimal edge dropped"
    assert excinfo.value.witness["edge"] == ["a", "b"]
    assert isinstance(excinfo.value, InvariantViolation)


def test_step_needs_a_violating_pair():
    prev = make_record(0, [("a", "b")], PAIR)
    with pytest.raises(MonitorViolation) as excinfo:
        record_step(prev, [("a", "b"), ("a", "a")], MonitorMode.PLAIN, PAIR)
    assert excinfo.value.condition == "no violating pair"


def test_plain_violating_pair_is_not_enough_in_strong_mode():
    prev = make_record(0, [("b", "c"), ("c", "b")], TRIPLE)
    nxt = [("b", "c"), ("c", "b"), ("a", "b")]
    with pytest.raises(MonitorViolation) as excinfo:
        record_step(prev, nxt, MonitorMode.STRONG, TRIPLE)
    assert excinfo.value.condition == "no strongly violating pair"

    record = record_step(prev, nxt, MonitorMode.PLAIN, TRIPLE)
    assert record.evidence == ("a", "b", "violating")
    assert record.signature.g == (0, 0, 0, 0, 0)


@pytest.mark.parametrize("n, mode, bipartite, expected", [
    (0, MonitorMode.PLAIN, False, (1, 0)),
    (2, MonitorMode.STRONG, True, (2, 4)),
    (2, MonitorMode.PLAIN, True, (4, 8)),
    (2, MonitorMode.PLAIN, False, (5, 10)),
])
def test_step_bound(n, mode, bipartite, expected):
    assert step_bound(n, mode, bipartite) == expected


def test_monitor_collects_a_run():
    monitor = IterationMonitor(PAIR, MonitorMode.STRONG, True)
    monitor.start([])
    monitor.step([("a", "b")])
    report = monitor.finalize()
    assert report.total_steps == 1
    assert report.passed
    assert report.bound == 4 and report.signature_space == 2
    assert report.verdicts == ["step 1: a->b strongly_violating"]
    assert report.to_dict()["mode"] == "strong"


def test_finalize_flags_overlong_runs():
    records = [make_record(i, [], PAIR) for i in range(6)]
    report = finalize(records, MonitorMode.STRONG, True, 2)
    assert report.total_steps == 5
    assert not report.passed


if __name__ == "__main__":
    pytest.main([__file__])
