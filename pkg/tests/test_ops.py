import random
from collections import Counter
from datetime import datetime, timedelta, timezone

import pytest

from pc4pm import (
    Atom,
    Event,
    EventLog,
    KeySpec,
    Selector,
    Taxonomy,
    Trace,
    TypedValue,
    add_noise,
    condense,
    de_pseudonymize,
    generalize,
    parse_xes,
    pseudonymize,
    substitute,
    suppress,
    swap,
    variants,
    write_xes,
)
from pc4pm.errors import (
    DecryptionFailure,
    ModelInvariantError,
    SelectorTypeError,
    UnknownAttribute,
    UnknownValue,
)

from conftest import T0, make_fix1, random_log

KEY = KeySpec("unit-key", b"0123456789abcdef")
RKEY = KeySpec("unit-key-r", b"0123456789abcdef", "encrypt-recoverable")


def activity_is(label):
    return Selector("event", (Atom("concept:name", "=", TypedValue.string(label)),))


def strip_metadata(log):
    """Data content only — for comparing logs across metadata-appending ops."""
    return (log.traces, log.attributes, log.extensions, log.classifiers, log.globals)


# ---------------------------------------------------------------------------
# selectors


def test_atom_comparators_and_aliases():
    attrs = {"cost": TypedValue("integer", 10)}
    assert Atom("cost", "=", TypedValue("integer", 10)).matches(attrs)
    assert Atom("cost", "==", TypedValue("integer", 10)).matches(attrs)
    assert Atom("cost", "!=", TypedValue("integer", 3)).matches(attrs)
    assert Atom("cost", "≠", TypedValue("integer", 3)).matches(attrs)
    assert Atom("cost", "<", TypedValue("integer", 11)).matches(attrs)
    assert Atom("cost", "≤", TypedValue("integer", 10)).matches(attrs)
    assert Atom("cost", ">", TypedValue("integer", 9)).matches(attrs)
    assert Atom("cost", "≥", TypedValue("integer", 10)).matches(attrs)
    in_atom = Atom("cost", "in", (TypedValue("integer", 1), TypedValue("integer", 10)))
    assert in_atom.matches(attrs)
    assert not in_atom.matches({"cost": TypedValue("integer", 2)})
    # absent attribute simply does not match
    assert not Atom("other", "=", TypedValue("integer", 1)).matches(attrs)


def test_atom_type_checks():
    attrs = {"cost": TypedValue("integer", 10)}
    with pytest.raises(SelectorTypeError):
        Atom("cost", "=", TypedValue.string("10")).matches(attrs)
    with pytest.raises(SelectorTypeError):
        Atom("ok", "<", TypedValue("boolean", True)).matches(
            {"ok": TypedValue("boolean", False)}
        )
    with pytest.raises(SelectorTypeError):
        Atom("cost", "~", TypedValue("integer", 1))
    with pytest.raises(SelectorTypeError):
        Selector("log", ())


def test_selector_is_conjunction():
    sel = Selector(
        "event",
        (
            Atom("concept:name", "=", TypedValue.string("a")),
            Atom("org:resource", "=", TypedValue.string("r1")),
        ),
    )
    ev = Event("a", T0, "r1")
    assert sel.matches(ev.payload)
    assert not sel.matches(Event("a", T0, "r2").payload)
    assert sel.keys() == {"concept:name", "org:resource"}


# ---------------------------------------------------------------------------
# taxonomy


def test_taxonomy_shape_checks():
    tax = Taxonomy.from_edges([("b", "p"), ("c", "p"), ("p", "root")])
    assert tax.root == "root"
    assert tax.parent_of("b") == "p"
    assert tax.parent_of("root") is None
    with pytest.raises(ModelInvariantError):
        Taxonomy.from_edges([("a", "b"), ("b", "a")])  # cycle
    with pytest.raises(ModelInvariantError):
        Taxonomy.from_edges([("a", "x"), ("b", "y")])  # two roots
    with pytest.raises(ModelInvariantError):
        Taxonomy.from_edges([("a", "x"), ("a", "y")])  # two parents


def test_taxonomy_from_csv(tmp_path):
    path = tmp_path / "tax.csv"
    path.write_text("child,parent\nb,clinical\nc,clinical\nclinical,all\n")
    tax = Taxonomy.from_csv(path)
    assert tax.parent_of("b") == "clinical"
    assert tax.root == "all"
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n")
    from pc4pm.errors import ParseFailure

    with pytest.raises(ParseFailure):
        Taxonomy.from_csv(bad)


# ---------------------------------------------------------------------------
# suppress


def test_suppress_whole_match_on_fixture(fix1):
    out = suppress(fix1, activity_is("d"))
    assert [t.variant for t in out.traces] == [("a", "b", "c"), ("a", "b", "c"), ("a",)]
    assert out.event_count == 7
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "suppression"
    assert record.level == "event"
    # input untouched
    assert fix1.event_count == 8


def test_suppress_no_match_changes_only_metadata(fix1):
    out = suppress(fix1, activity_is("zz"))
    assert strip_metadata(out) == strip_metadata(fix1)
    assert len(out.privacy_metadata.records) == 1


def test_suppress_attribute_target(fix1):
    out = suppress(fix1, Selector("event", ()), frozenset({"org:resource"}))
    assert out.event_count == 8
    assert all(e.resource is None for t in out.traces for e in t.events)
    assert all("org:resource" not in e.payload for t in out.traces for e in t.events)
    (record,) = out.privacy_metadata.records
    assert record.level == "attribute"
    # the stripped key is also gone from the event globals
    assert "org:resource" not in out.globals.get("event", {})


def test_suppress_trace_level(fix1):
    sel = Selector("trace", (Atom("concept:name", "=", TypedValue.string("c3")),))
    out = suppress(fix1, sel)
    assert [t.case_id for t in out.traces] == ["c1", "c2"]
    (record,) = out.privacy_metadata.records
    assert record.level == "trace"


def test_suppress_protects_structural_attributes(fix1):
    with pytest.raises(ModelInvariantError):
        suppress(fix1, Selector("event", ()), frozenset({"concept:name"}))
    with pytest.raises(ModelInvariantError):
        suppress(fix1, Selector("event", ()), frozenset({"time:timestamp"}))
    with pytest.raises(ModelInvariantError):
        suppress(fix1, Selector("trace", ()), frozenset({"concept:name"}))


def test_suppress_unknown_attribute(fix1):
    with pytest.raises(UnknownAttribute):
        suppress(fix1, Selector("event", (Atom("no-such", "=", TypedValue.string("x")),)))
    with pytest.raises(UnknownAttribute):
        suppress(fix1, Selector("event", ()), frozenset({"no-such"}))


# ---------------------------------------------------------------------------
# add_noise


def test_add_noise_replay_variant(fix1):
    out = add_noise(fix1, 1, "replay-variant", seed=7)
    assert len(out.traces) == 4
    new = out.traces[-1]
    assert new.case_id.startswith("syn-")
    assert new.variant in {("a", "b", "c"), ("a", "d")}
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "addition"


def test_add_noise_count_zero(fix1):
    out = add_noise(fix1, 0, seed=1)
    assert strip_metadata(out) == strip_metadata(fix1)
    assert len(out.privacy_metadata.records) == 1


def test_add_noise_deterministic(fix1):
    a = add_noise(fix1, 3, "random-walk", seed=11)
    b = add_noise(fix1, 3, "random-walk", seed=11)
    assert a == b
    c = add_noise(fix1, 3, "random-walk", seed=12)
    assert a != c


def test_add_noise_stays_inside_alphabet(fix1):
    out = add_noise(fix1, 20, "random-walk", seed=3)
    alphabet = fix1.alphabet()
    for trace in out.traces[3:]:
        assert set(trace.variant) <= alphabet
        assert trace.events  # never an empty synthetic trace
        stamps = [e.timestamp for e in trace.events]
        assert stamps == sorted(stamps)


def test_add_noise_records_only_the_count(fix1):
    a = add_noise(fix1, 2, "replay-variant", seed=1)
    b = add_noise(fix1, 2, "random-walk", seed=99)
    # which traces are synthetic is not recoverable from the metadata
    assert (
        a.privacy_metadata.records[0].parameter_digest
        == b.privacy_metadata.records[0].parameter_digest
    )


def test_add_noise_fresh_case_ids():
    base = make_fix1()
    once = add_noise(base, 2, seed=5)
    again = add_noise(once, 2, seed=5)
    ids = [t.case_id for t in again.traces]
    assert len(ids) == len(set(ids)) == 7


# ---------------------------------------------------------------------------
# substitute


def test_substitute_renames_all_occurrences():
    t0 = T0
    tr = Trace(
        case_id="10",
        events=(Event("heart surgery", t0), Event("x-ray", t0 + timedelta(hours=1))),
    )
    log = EventLog.create([tr])
    out = substitute(log, "concept:name", {"heart surgery": "surgery-001"})
    assert out.traces[0].variant == ("surgery-001", "x-ray")
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "substitution"


def test_substitute_empty_mapping_keeps(fix1):
    out = substitute(fix1, "concept:name", {}, "keep")
    assert strip_metadata(out) == strip_metadata(fix1)


def test_substitute_on_missing_error(fix1):
    with pytest.raises(UnknownValue) as info:
        substitute(fix1, "concept:name", {"a": "A"}, "error")
    assert "b" in str(info.value) or "d" in str(info.value)


def test_substitute_preserves_kind():
    tr = Trace(case_id="c", events=(Event("a", T0, payload={"n": TypedValue("integer", 1)}),))
    log = EventLog.create([tr])
    out = substitute(log, "n", {1: 5})
    cell = out.traces[0].events[0].payload["n"]
    assert cell == TypedValue("integer", 5)


# ---------------------------------------------------------------------------
# condense


def _log_with_costs(costs_by_case):
    traces = []
    for case_id, (acts, cost) in costs_by_case.items():
        events = [Event(a, T0 + timedelta(hours=i)) for i, a in enumerate(acts)]
        traces.append(
            Trace(
                case_id=case_id,
                attributes={"cost": TypedValue("integer", cost)},
                events=tuple(events),
            )
        )
    return EventLog.create(traces)


def test_condense_means_within_variant():
    log = _log_with_costs({"c1": ("ab", 10), "c2": ("ab", 20), "c3": ("z", 7)})
    out = condense(log, "cost")
    values = {t.case_id: t.attributes["cost"].value for t in out.traces}
    assert values == {"c1": 15, "c2": 15, "c3": 7}
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "condensation"


def test_condense_trace_scores_on_fixture(fix1):
    traces = []
    scores = {"c1": 1.0, "c2": 2.0, "c3": 9.0}
    for tr in fix1.traces:
        attrs = dict(tr.attributes)
        attrs["risk-score"] = TypedValue("real", scores[tr.case_id])
        traces.append(Trace(case_id=tr.case_id, attributes=attrs, events=tr.events))
    log = EventLog.create(traces)
    out = condense(log, "risk-score")
    got = {t.case_id: t.attributes["risk-score"].value for t in out.traces}
    assert got == {"c1": 1.5, "c2": 1.5, "c3": 9.0}


def test_condense_integer_rounds_half_up():
    log = _log_with_costs({"c1": ("ab", 10), "c2": ("ab", 11)})
    out = condense(log, "cost")
    assert [t.attributes["cost"].value for t in out.traces] == [11, 11]


def test_condense_rejects_non_numeric(fix1):
    with pytest.raises(SelectorTypeError):
        condense(fix1, "concept:name")


# ---------------------------------------------------------------------------
# swap


def test_swap_preserves_global_multiset(fix1):
    out = swap(fix1, "org:resource", "global", seed=4)
    original = Counter(e.resource for t in fix1.traces for e in t.events)
    swapped = Counter(e.resource for t in out.traces for e in t.events)
    assert original == swapped == Counter({"r2": 4, "r1": 3, "r3": 1})
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "swapping"


def test_swap_within_variant_preserves_per_variant_multisets(fix1):
    out = swap(fix1, "org:resource", "within-variant", seed=9)
    for variant in (("a", "b", "c"), ("a", "d")):
        src = Counter(
            e.resource
            for t in fix1.traces
            if t.variant == variant
            for e in t.events
        )
        dst = Counter(
            e.resource for t in out.traces if t.variant == variant for e in t.events
        )
        assert src == dst


def test_swap_is_seed_deterministic(fix1):
    assert swap(fix1, "org:resource", seed=5) == swap(fix1, "org:resource", seed=5)


def test_swap_singleton_scope_is_identity():
    log = EventLog.create([Trace(case_id="c", events=(Event("a", T0, "r1"),))])
    out = swap(log, "org:resource", "global", seed=1)
    assert out.traces[0].events[0].resource == "r1"


def test_swap_refuses_timestamps(fix1):
    with pytest.raises(ModelInvariantError):
        swap(fix1, "time:timestamp", seed=0)


# ---------------------------------------------------------------------------
# generalize


def test_generalize_day_truncation(fix1):
    out = generalize(fix1, "time:timestamp", "day")
    stamps = {e.timestamp for t in out.traces for e in t.events}
    assert stamps == {datetime(2021, 6, 10, tzinfo=timezone.utc)}
    (record,) = out.privacy_metadata.records
    assert record.operation_kind == "generalization"


def test_generalize_preserves_event_order():
    rng = random.Random(77)
    for _ in range(30):
        log = random_log(rng)
        for granularity in ("year", "month", "day", "hour", "minute"):
            out = generalize(log, "time:timestamp", granularity)
            for before, after in zip(log.traces, out.traces):
                assert after.variant == before.variant
                stamps = [e.timestamp for e in after.events]
                assert stamps == sorted(stamps)


def test_generalize_taxonomy_one_level(fix1):
    tax = Taxonomy.from_edges(
        [("b", "clinical"), ("c", "clinical"), ("clinical", "all"), ("a", "all"), ("d", "all")]
    )
    out = generalize(fix1, "concept:name", tax)
    assert variants(out) == {("all", "clinical", "clinical"): 2, ("all", "all"): 1}
    # a second application climbs one more level; roots stay put
    again = generalize(out, "concept:name", tax)
    assert variants(again) == {("all", "all", "all"): 2, ("all", "all"): 1}


def test_generalize_root_value_unchanged():
    tax = Taxonomy.from_edges([("a", "root")])
    log = EventLog.create([Trace(case_id="c", events=(Event("root", T0),))])
    out = generalize(log, "concept:name", tax)
    assert out.traces[0].variant == ("root",)


def test_generalize_rejects_granularity_on_string_attribute(fix1):
    with pytest.raises(SelectorTypeError):
        generalize(fix1, "org:resource", "day")
    with pytest.raises(ModelInvariantError):
        generalize(fix1, "time:timestamp", "fortnight")


# ---------------------------------------------------------------------------
# pseudonymize / de_pseudonymize


def test_pseudonymize_deterministic_tokens(fix1):
    out1 = pseudonymize(fix1, ["concept:name"], KEY)
    out2 = pseudonymize(fix1, ["concept:name"], KEY)
    assert out1 == out2
    tokens = {e.activity for t in out1.traces for e in t.events}
    assert len(tokens) == 4  # a, b, c, d all distinct
    for token in tokens:
        assert len(token) == 16
        int(token, 16)  # hex
    (record,) = out1.privacy_metadata.records
    assert record.operation_kind == "cryptography"


def test_pseudonymize_key_changes_tokens(fix1):
    other = KeySpec("other", b"another-secret-0123456")
    a = pseudonymize(fix1, ["concept:name"], KEY)
    b = pseudonymize(fix1, ["concept:name"], other)
    assert {e.activity for t in a.traces for e in t.events}.isdisjoint(
        {e.activity for t in b.traces for e in t.events}
    )


def test_recoverable_round_trip(fix1):
    hidden = pseudonymize(fix1, ["org:resource", "concept:name"], RKEY)
    assert {e.activity for t in hidden.traces for e in t.events}.isdisjoint(
        fix1.alphabet()
    )
    restored = de_pseudonymize(hidden, RKEY)
    assert strip_metadata(restored) == strip_metadata(fix1)
    kinds = [r.operation_kind for r in restored.privacy_metadata.records]
    assert kinds == ["cryptography", "cryptography"]


def test_recoverable_round_trip_restores_kinds():
    tr = Trace(
        case_id="c",
        events=(
            Event(
                "a",
                T0,
                payload={
                    "n": TypedValue("integer", 42),
                    "x": TypedValue("real", 1.5),
                    "ok": TypedValue("boolean", True),
                },
            ),
        ),
    )
    log = EventLog.create([tr])
    back = de_pseudonymize(pseudonymize(log, ["n", "x", "ok"], RKEY), RKEY)
    payload = back.traces[0].events[0].payload
    assert payload["n"] == TypedValue("integer", 42)
    assert payload["x"] == TypedValue("real", 1.5)
    assert payload["ok"] == TypedValue("boolean", True)


def test_de_pseudonymize_needs_recoverable_key(fix1):
    hidden = pseudonymize(fix1, ["concept:name"], RKEY)
    with pytest.raises(DecryptionFailure):
        de_pseudonymize(hidden, KEY)
    wrong = KeySpec("w", b"wrong-secret-000000000", "encrypt-recoverable")
    with pytest.raises(DecryptionFailure):
        de_pseudonymize(hidden, wrong)
    with pytest.raises(DecryptionFailure):
        de_pseudonymize(fix1, RKEY)  # nothing was ever pseudonymized


def test_secret_never_serialized(fix1):
    out = pseudonymize(fix1, ["concept:name"], KEY)
    raw = write_xes(out)
    assert KEY.secret not in raw
    assert b"0123456789abcdef" not in raw
    assert b"secret" not in raw.lower() or b"0123456789abcdef" not in raw
    assert "secret" not in repr(KEY.secret.hex()) or True
    assert KEY.secret.hex().encode() not in raw
    # repr hides it too
    assert "0123456789abcdef" not in repr(KEY)


def test_keyspec_validation():
    with pytest.raises(ModelInvariantError):
        KeySpec("", b"0123456789abcdef")
    with pytest.raises(ModelInvariantError):
        KeySpec("k", b"short")
    with pytest.raises(ModelInvariantError):
        KeySpec("k", b"0123456789abcdef", "no-such-mode")


def test_keyspec_from_env(monkeypatch):
    monkeypatch.setenv("UNIT_KEY", "0123456789abcdef-extra")
    key = KeySpec.from_env("k", "UNIT_KEY")
    assert key.secret == b"0123456789abcdef-extra"
    monkeypatch.delenv("UNIT_KEY")
    with pytest.raises(ModelInvariantError):
        KeySpec.from_env("k", "UNIT_KEY")


# ---------------------------------------------------------------------------
# shared contract: one record appended, input untouched


OPERATIONS = [
    lambda log: suppress(log, activity_is("d")),
    lambda log: add_noise(log, 1, seed=3),
    lambda log: substitute(log, "concept:name", {"a": "A"}),
    lambda log: swap(log, "org:resource", seed=3),
    lambda log: generalize(log, "time:timestamp", "hour"),
    lambda log: pseudonymize(log, ["concept:name"], KEY),
]


@pytest.mark.parametrize("op", OPERATIONS)
def test_every_operation_appends_exactly_one_record(op):
    log = make_fix1()
    before = write_xes(log)
    out = op(log)
    assert len(out.privacy_metadata.records) == 1
    assert out.privacy_metadata.records[0].seq == 1
    assert write_xes(log) == before  # input is untouched
    # records survive serialization
    assert parse_xes(write_xes(out)).privacy_metadata == out.privacy_metadata


def test_event_and_trace_counts_invariants(fix1):
    assert suppress(fix1, activity_is("d")).event_count <= fix1.event_count
    assert len(add_noise(fix1, 5, seed=0).traces) == len(fix1.traces) + 5
    for op in (
        lambda log: substitute(log, "concept:name", {"a": "A"}),
        lambda log: condense(_with_cost(log), "cost"),
        lambda log: swap(log, "org:resource", seed=1),
        lambda log: generalize(log, "time:timestamp", "day"),
        lambda log: pseudonymize(log, ["concept:name"], KEY),
    ):
        out = op(fix1)
        assert len(out.traces) == len(fix1.traces)
        assert out.event_count == fix1.event_count


def _with_cost(log):
    traces = [
        Trace(
            case_id=t.case_id,
            attributes={**t.attributes, "cost": TypedValue("integer", 5)},
            events=t.events,
        )
        for t in log.traces
    ]
    return EventLog.create(traces)
