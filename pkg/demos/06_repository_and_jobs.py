"""Store logs in the content-addressed repository, run jobs, inspect lineage.

Everything the CLI (`pc4pm upload/run/lineage`) and the HTTP service do goes
through these two objects.

Run: python demos/06_repository_and_jobs.py
"""

import json
import os
import tempfile
from datetime import datetime, timedelta, timezone

from pc4pm import Event, EventLog, JobRunner, Repository, Trace, parse_xes, write_xes

T0 = datetime(2021, 6, 10, 10, 0, tzinfo=timezone.utc)


def build_log():
    plans = {
        "c1": "abc", "c2": "abc", "c3": "abd", "c4": "abd", "c5": "ae",
    }
    traces = []
    for case_id, acts in plans.items():
        events = tuple(
            Event(act, T0 + timedelta(hours=i)) for i, act in enumerate(acts)
        )
        traces.append(Trace(case_id=case_id, events=events))
    return EventLog.create(traces)


def main():
    os.environ.setdefault("DEMO_KEY", "a-demo-secret-of-32-characters!!")
    with tempfile.TemporaryDirectory() as root:
        repo = Repository(root)
        runner = JobRunner(repo, max_workers=2)

        source = repo.store(write_xes(build_log()), "xes", "claims-log")
        print(f"stored {source.name} as {source.entry_id}")

        # identical bytes land on the same entry - the repository deduplicates
        again = repo.store(write_xes(build_log()), "xes", "claims-log-copy")
        print(f"storing the same bytes again returns {again.entry_id} "
              f"(same entry: {again.entry_id == source.entry_id})\n")

        # run a chain: enforce group privacy, then pseudonymize the result
        gp_id = runner.submit(
            "group-privacy", source.entry_id,
            {"knowledge_kind": "set", "k": 2, "l": 2},
        )
        gp = runner.wait(gp_id)
        print(f"group-privacy job: {gp['state']}, outputs {gp['outputs']}")

        crypt_id = runner.submit(
            "anon-ops.pseudonymize", gp["outputs"][0],
            {"attributes": ["concept:name"], "key_id": "demo", "key_env": "DEMO_KEY"},
        )
        crypt = runner.wait(crypt_id)
        print(f"pseudonymize job:  {crypt['state']}, outputs {crypt['outputs']}\n")

        final_id = crypt["outputs"][0]
        final_log = parse_xes(repo.content(final_id))
        print("activities in the published log:", sorted(final_log.alphabet())[:3], "...")
        print("operations recorded:",
              [r.operation_kind for r in final_log.privacy_metadata.records], "\n")

        print("full provenance of the published entry:")
        print(json.dumps(repo.lineage(final_id), indent=2))

        # a failed job never stores partial outputs
        os.environ["BAD_KEY"] = "short"
        bad_id = runner.submit(
            "anon-ops.pseudonymize", source.entry_id,
            {"attributes": ["concept:name"], "key_id": "x", "key_env": "BAD_KEY"},
        )
        bad = runner.wait(bad_id)
        print(f"\njob with a too-short key: state={bad['state']}, error={bad['error']}")
        runner.shutdown()


if __name__ == "__main__":
    main()
