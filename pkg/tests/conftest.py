import random
from datetime import datetime, timedelta, timezone

import pytest

from pc4pm import Event, EventLog, Trace

T0 = datetime(2021, 6, 10, 10, 0, 0, tzinfo=timezone.utc)

# shared fixture: c1 <a,b,c>, c2 <a,b,c>, c3 <a,d>, hourly events,
# a done by r1, b and c by r2, d by r3
FIX1_RESOURCES = {"a": "r1", "b": "r2", "c": "r2", "d": "r3"}
FIX1_CASES = (("c1", "abc"), ("c2", "abc"), ("c3", "ad"))


def make_fix1() -> EventLog:
    traces = []
    for case_id, acts in FIX1_CASES:
        events = [
            Event(act, T0 + timedelta(hours=i), FIX1_RESOURCES[act])
            for i, act in enumerate(acts)
        ]
        traces.append(Trace(case_id=case_id, events=tuple(events)))
    return EventLog.create(traces)


@pytest.fixture
def fix1() -> EventLog:
    return make_fix1()


def random_log(
    rng: random.Random,
    max_traces: int = 8,
    max_activities: int = 6,
    max_events: int = 6,
    labels=None,
    with_resources: bool = False,
    allow_empty_traces: bool = False,
) -> EventLog:
    """Small random log for property loops; shape is bounded but arbitrary."""
    if labels is None:
        labels = [chr(ord("a") + i) for i in range(max_activities)]
    else:
        labels = list(labels)[:max_activities]
    alphabet = labels[: rng.randint(1, len(labels))]
    resources = [f"res-{i}" for i in range(3)]
    traces = []
    for t in range(rng.randint(1, max_traces)):
        low = 0 if allow_empty_traces else 1
        length = rng.randint(low, max_events)
        stamp = T0 + timedelta(days=t)
        events = []
        for _ in range(length):
            stamp += timedelta(minutes=rng.randint(1, 300))
            events.append(
                Event(
                    rng.choice(alphabet),
                    stamp,
                    rng.choice(resources) if with_resources else None,
                )
            )
        traces.append(Trace(case_id=f"case-{t}", events=tuple(events)))
    return EventLog.create(traces)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per top-level acceptance check, after the run."""
    reports = []
    for key in ("passed", "failed"):
        reports.extend(terminalreporter.stats.get(key, []))
    acceptance = sorted(
        (r for r in reports if "test_acceptance" in r.nodeid and r.when == "call"),
        key=lambda r: r.nodeid,
    )
    if not acceptance:
        return
    terminalreporter.write_sep("=", "acceptance summary")
    for report in acceptance:
        outcome = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{outcome}  {name}")
