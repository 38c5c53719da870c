"""Apply the seven anonymization operations to a small hospital log.

Run: python demos/01_anonymization_walkthrough.py
"""

from datetime import datetime, timedelta, timezone

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
    pseudonymize,
    substitute,
    suppress,
    swap,
    variants,
)

T0 = datetime(2021, 6, 10, 10, 0, tzinfo=timezone.utc)


def build_log():
    """Three patient journeys; c3's rare path makes that patient re-identifiable."""
    plans = [
        ("c1", ["registration", "blood test", "heart surgery"], 1200),
        ("c2", ["registration", "blood test", "heart surgery"], 1400),
        ("c3", ["registration", "experimental therapy"], 9000),
    ]
    resources = {
        "registration": "desk-1",
        "blood test": "lab-2",
        "heart surgery": "dr-john",
        "experimental therapy": "dr-kim",
    }
    traces = []
    for case_id, acts, cost in plans:
        events = tuple(
            Event(act, T0 + timedelta(hours=i), resources[act])
            for i, act in enumerate(acts)
        )
        traces.append(
            Trace(
                case_id=case_id,
                attributes={"cost": TypedValue("integer", cost)},
                events=events,
            )
        )
    return EventLog.create(traces)


def show(title, log):
    print(f"--- {title}")
    for trace in log.traces:
        acts = " -> ".join(e.activity for e in trace.events)
        print(f"  {trace.case_id}: {acts}")
    for record in log.privacy_metadata.records:
        print(f"  [{record.seq}] {record.operation_kind} at level {record.level}")
    print()


def main():
    log = build_log()
    show("original", log)
    print("variants:", variants(log), "\n")

    # 1. suppression: drop the rare therapy entirely
    sel = Selector(
        "event",
        (Atom("concept:name", "=", TypedValue.string("experimental therapy")),),
    )
    show("after suppressing the rare activity", suppress(log, sel))

    # 2. addition: blend in synthetic traces that replay existing variants
    show("after adding two synthetic traces", add_noise(log, 2, seed=7))

    # 3. substitution: rename a sensitive label
    renamed = substitute(log, "concept:name", {"heart surgery": "surgery-001"})
    show("after substituting the surgery label", renamed)

    # 4. condensation: replace per-case costs by their variant mean
    condensed = condense(log, "cost")
    print("--- costs after condensation (per variant mean)")
    for trace in condensed.traces:
        print(f"  {trace.case_id}: cost={trace.attributes['cost'].value}")
    print()

    # 5. swapping: shuffle who-did-what while keeping workload totals
    show("after swapping resources globally", swap(log, "org:resource", seed=3))

    # 6. generalization: coarsen timestamps, then climb an activity taxonomy
    by_day = generalize(log, "time:timestamp", "day")
    print("--- all timestamps after day-generalization")
    print(" ", sorted({e.timestamp.isoformat() for t in by_day.traces for e in t.events}))
    tax = Taxonomy.from_edges(
        [
            ("blood test", "diagnostics"),
            ("heart surgery", "treatment"),
            ("experimental therapy", "treatment"),
            ("registration", "admin"),
            ("diagnostics", "care"),
            ("treatment", "care"),
            ("admin", "care"),
        ]
    )
    show("after one taxonomy climb", generalize(log, "concept:name", tax))

    # 7. cryptography: recoverable pseudonyms, then the round trip back
    key = KeySpec("demo-key", b"a-demo-secret-of-32-characters!!", "encrypt-recoverable")
    hidden = pseudonymize(log, ["concept:name", "org:resource"], key)
    show("after recoverable pseudonymization", hidden)
    restored = de_pseudonymize(hidden, key)
    show("after de-pseudonymization (original labels back)", restored)


if __name__ == "__main__":
    main()
