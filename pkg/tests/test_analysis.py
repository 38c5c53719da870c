import random
from collections import Counter
from itertools import combinations
from statistics import fmean

import pytest

from pc4pm import (
    Atom,
    EventLog,
    Selector,
    TlkcParams,
    TypedValue,
    data_utility,
    disclosure_risk,
    enforce,
    render_risk,
    render_utility,
    suppress,
)
from pc4pm.errors import EmptyResult, ModelInvariantError

from conftest import random_log


def minus_d(log):
    sel = Selector("event", (Atom("concept:name", "=", TypedValue.string("d")),))
    return suppress(log, sel)


# ---------------------------------------------------------------------------
# risk


def test_risk_on_fixture(fix1):
    report = disclosure_risk(fix1, "set", 1)
    assert report.per_case_min_group == {"c1": 2, "c2": 2, "c3": 1}
    assert report.uniqueness_rate == pytest.approx(1 / 3)
    assert report.avg_reid_probability == pytest.approx(2 / 3)
    assert report.knowledge_kind == "set" and report.l == 1


def test_risk_l2_tightens_groups(fix1):
    report = disclosure_risk(fix1, "set", 2)
    assert report.per_case_min_group == {"c1": 2, "c2": 2, "c3": 1}
    deeper = disclosure_risk(fix1, "subsequence", 3)
    assert deeper.per_case_min_group == {"c1": 2, "c2": 2, "c3": 1}


def test_risk_empty_log():
    report = disclosure_risk(EventLog.create([]), "set", 1)
    assert report.uniqueness_rate == 0.0
    assert report.avg_reid_probability == 0.0
    assert report.per_case_min_group == {}


def test_risk_identical_traces_never_unique():
    rng = random.Random(12)
    log = random_log(rng, max_traces=1, max_activities=3, max_events=4)
    doubled = EventLog.create(
        [
            t.__class__(case_id=f"{t.case_id}-{i}", attributes={}, events=t.events)
            for t in log.traces
            for i in (0, 1)
        ]
    )
    report = disclosure_risk(doubled, "subsequence", 5)
    assert report.uniqueness_rate == 0.0
    assert all(g >= 2 for g in report.per_case_min_group.values())


def test_risk_validation(fix1):
    with pytest.raises(ModelInvariantError):
        disclosure_risk(fix1, "suffix", 1)
    with pytest.raises(ModelInvariantError):
        disclosure_risk(fix1, "set", 0)
    with pytest.raises(ModelInvariantError):
        RiskReportBad()


def RiskReportBad():
    from pc4pm import RiskReport

    return RiskReport("set", 1, 1.5, 0.0, {})


def test_risk_anti_monotone_in_l():
    rng = random.Random(40)
    for _ in range(20):
        log = random_log(rng, max_traces=6, max_activities=4, max_events=5)
        if not log.traces:
            continue
        for kind in ("set", "multiset", "subsequence"):
            r1 = disclosure_risk(log, kind, 1)
            r2 = disclosure_risk(log, kind, 2)
            r3 = disclosure_risk(log, kind, 3)
            for case_id in r1.per_case_min_group:
                assert (
                    r1.per_case_min_group[case_id]
                    >= r2.per_case_min_group[case_id]
                    >= r3.per_case_min_group[case_id]
                )
            assert r1.avg_reid_probability <= r2.avg_reid_probability <= r3.avg_reid_probability


def test_risk_matches_brute_force_oracle():
    rng = random.Random(1999)
    for _ in range(100):
        log = random_log(rng, max_traces=5, max_activities=4, max_events=4)
        if not log.traces:
            continue
        kind = rng.choice(("set", "multiset", "subsequence"))
        l = rng.randint(1, 3)
        report = disclosure_risk(log, kind, l)

        cases = [(t.case_id, t.variant) for t in log.traces]
        per_case = {}
        for case_id, acts in cases:
            pool = sorted(set(acts)) if kind == "set" else list(acts)
            best = len(cases)
            for size in range(1, min(l, len(pool)) + 1):
                for combo in combinations(pool, size):
                    group = 0
                    for _, other in cases:
                        if kind == "set":
                            hit = set(combo) <= set(other)
                        elif kind == "multiset":
                            need, have = Counter(combo), Counter(other)
                            hit = all(have[a] >= n for a, n in need.items())
                        else:
                            it = iter(other)
                            hit = all(any(x == y for y in it) for x in combo)
                        group += hit
                    best = min(best, group)
            per_case[case_id] = best

        assert report.per_case_min_group == per_case
        n = len(cases)
        assert report.uniqueness_rate == sum(1 for g in per_case.values() if g == 1) / n
        assert report.avg_reid_probability == fmean(1 / g for g in per_case.values())


# ---------------------------------------------------------------------------
# utility


def test_utility_on_fixture(fix1):
    report = data_utility(fix1, minus_d(fix1))
    assert report.variant_preservation == pytest.approx(0.5)
    assert report.df_distance == pytest.approx(0.2)
    assert report.event_count_ratio == pytest.approx(7 / 8)


def test_utility_identity(fix1):
    report = data_utility(fix1, fix1)
    assert report.variant_preservation == 1.0
    assert report.df_distance == 0.0
    assert report.event_count_ratio == 1.0


def test_utility_total_loss(fix1):
    report = data_utility(fix1, EventLog.create([]))
    assert report.variant_preservation == 0.0
    assert report.df_distance == 1.0
    assert report.event_count_ratio == 0.0


def test_utility_empty_original_convention(fix1):
    report = data_utility(EventLog.create([]), fix1)
    assert (report.variant_preservation, report.df_distance, report.event_count_ratio) == (
        1.0,
        0.0,
        1.0,
    )


def test_utility_df_distance_is_pseudometric():
    rng = random.Random(321)
    for _ in range(15):
        a = random_log(rng, max_traces=5, max_activities=4)
        b = random_log(rng, max_traces=5, max_activities=4)
        c = random_log(rng, max_traces=5, max_activities=4)
        if not (a.traces and b.traces and c.traces):
            continue
        d_ab = data_utility(a, b).df_distance
        d_ba = data_utility(b, a).df_distance
        assert d_ab == pytest.approx(d_ba)
        assert data_utility(a, a).df_distance == 0.0
        d_ac = data_utility(a, c).df_distance
        d_cb = data_utility(c, b).df_distance
        assert d_ab <= d_ac + d_cb + 1e-9


def test_utility_report_bounds():
    from pc4pm import UtilityReport

    with pytest.raises(ModelInvariantError):
        UtilityReport(1.2, 0.0, 1.0)
    with pytest.raises(ModelInvariantError):
        UtilityReport(1.0, -0.1, 1.0)
    with pytest.raises(ModelInvariantError):
        UtilityReport(1.0, 0.0, -1.0)
    UtilityReport(1.0, 0.0, 2.5)  # ratios above 1 are legal (noise addition)


# ---------------------------------------------------------------------------
# cross-module: enforcement lowers measured risk, costs utility


def test_enforcement_reduces_risk():
    rng = random.Random(73)
    seen_improvement = 0
    for _ in range(25):
        log = random_log(rng, max_traces=6, max_activities=4, max_events=5)
        if not log.traces:
            continue
        before = disclosure_risk(log, "set", 2)
        try:
            out = enforce(log, TlkcParams(k=2, l=2), "set")
        except EmptyResult:
            continue
        after = disclosure_risk(out, "set", 2)
        assert after.uniqueness_rate == 0.0
        assert after.avg_reid_probability <= before.avg_reid_probability + 1e-12
        if after.avg_reid_probability < before.avg_reid_probability:
            seen_improvement += 1
        utility = data_utility(log, out)
        assert utility.event_count_ratio <= 1.0
    assert seen_improvement >= 3


# ---------------------------------------------------------------------------
# rendering


def test_render_risk_text(fix1):
    text = render_risk(disclosure_risk(fix1, "set", 1))
    assert "knowledge kind:          set" in text
    assert "uniqueness rate:         0.333333" in text
    assert "avg re-id probability:   0.666667" in text
    assert "  c3: 1" in text


def test_render_utility_text(fix1):
    text = render_utility(data_utility(fix1, minus_d(fix1)))
    assert "variant preservation:  0.500000" in text
    assert "df distance:           0.200000" in text
    assert "event count ratio:     0.875000" in text
