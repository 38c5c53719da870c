"""Background execution of anonymization techniques over repository entries.

A job takes one stored XES entry, runs one technique with a validated
parameter set, and stores the results back as child entries.  Validation is
synchronous (bad configurations are rejected at submit time); execution runs
on a thread pool and is observed by polling.
"""

from __future__ import annotations

import dataclasses
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Optional

from . import connector as connector_mod
from . import dp as dp_mod
from . import group_privacy as gp_mod
from . import ops as ops_mod
from . import roles as roles_mod
from .ela import write_ela
from .errors import ParameterValidation, Pc4pmError, UnknownEntry
from .guidance import runner_schema
from .model import TypedValue
from .repo import Repository
from .util import format_timestamp, parse_timestamp, truncate_millis
from .xes import parse_xes, write_xes

JOB_STATES = ("queued", "running", "done", "failed")


# ---------------------------------------------------------------------------
# parameter coercion


def _typed(kind: str, value) -> TypedValue:
    """Build a TypedValue from a JSON-ish payload, converting as needed."""
    if kind == "integer":
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ValueError(f"not an integer: {value!r}")
        return TypedValue("integer", int(value))
    if kind == "real":
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ValueError(f"not a number: {value!r}")
        return TypedValue("real", float(value))
    if kind == "boolean":
        if isinstance(value, bool):
            return TypedValue("boolean", value)
        if value in ("true", "false"):
            return TypedValue("boolean", value == "true")
        raise ValueError(f"not a boolean: {value!r}")
    if kind == "datetime":
        return TypedValue("datetime", parse_timestamp(str(value)))
    if kind in ("string", "id"):
        if not isinstance(value, str):
            raise ValueError(f"not a string: {value!r}")
        return TypedValue(kind, value)
    raise ValueError(f"unknown value kind: {kind!r}")


def _convert_atom(spec) -> ops_mod.Atom:
    if not isinstance(spec, (list, tuple)) or len(spec) < 3:
        raise ValueError(
            "each condition is [attribute, comparator, kind, value] "
            "or [attribute, 'in', [[kind, value], ...]]"
        )
    key, comparator = spec[0], spec[1]
    if not isinstance(key, str) or not isinstance(comparator, str):
        raise ValueError("attribute and comparator must be strings")
    if comparator == "in":
        if len(spec) != 3 or not isinstance(spec[2], (list, tuple)):
            raise ValueError("'in' takes one list of [kind, value] pairs")
        members = []
        for member in spec[2]:
            if not isinstance(member, (list, tuple)) or len(member) != 2:
                raise ValueError("'in' members are [kind, value] pairs")
            members.append(_typed(member[0], member[1]))
        return ops_mod.Atom(key, "in", tuple(members))
    if len(spec) != 4:
        raise ValueError("each condition is [attribute, comparator, kind, value]")
    return ops_mod.Atom(key, comparator, _typed(spec[2], spec[3]))


def _convert_mapping(mapping: dict, value_kind: str) -> dict:
    out = {}
    for key, value in mapping.items():
        out[_typed(value_kind, key).value] = _typed(value_kind, value).value
    return out


def _validate_number(name, value, spec, messages):
    low, high = spec.get("min"), spec.get("max")
    if low is not None:
        if spec.get("exclusive_min"):
            if value <= low:
                messages[name] = f"must be greater than {low}"
        elif value < low:
            messages[name] = f"must be at least {low}"
    if high is not None and value > high:
        messages[name] = f"must be at most {high}"


def validate_params(technique_id: str, params: dict) -> dict:
    """Check a raw parameter mapping against the technique's declared schema.

    Returns the cleaned mapping with defaults filled in; raises
    ParameterValidation carrying one message per offending parameter.
    """
    schema = runner_schema(technique_id)
    declared = {p["name"]: p for p in schema["parameters"]}
    messages: dict = {}
    for name in params:
        if name not in declared:
            messages[name] = "unknown parameter"
    clean: dict = {}
    for name, spec in declared.items():
        if name not in params:
            if spec.get("required"):
                messages[name] = "required parameter is missing"
            elif "default" in spec:
                clean[name] = spec["default"]
            continue
        value = params[name]
        kind = spec["type"]
        if kind == "integer":
            if isinstance(value, bool) or not (
                isinstance(value, int)
                or (isinstance(value, float) and value.is_integer())
            ):
                messages[name] = "must be an integer"
                continue
            value = int(value)
            _validate_number(name, value, spec, messages)
        elif kind == "real":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                messages[name] = "must be a number"
                continue
            value = float(value)
            _validate_number(name, value, spec, messages)
        elif kind == "string":
            if not isinstance(value, str):
                messages[name] = "must be a string"
                continue
        elif kind == "boolean":
            if not isinstance(value, bool):
                messages[name] = "must be true or false"
                continue
        elif kind == "choice":
            if value not in spec["choices"]:
                messages[name] = f"must be one of {', '.join(spec['choices'])}"
                continue
        elif kind == "list":
            if not isinstance(value, (list, tuple)):
                messages[name] = "must be a list"
                continue
            value = list(value)
        elif kind == "object":
            if not isinstance(value, dict):
                messages[name] = "must be an object"
                continue
        if name not in messages:
            clean[name] = value
    if not messages:
        _validate_cross_field(technique_id, clean, messages)
    if messages:
        raise ParameterValidation(messages)
    return clean


def _validate_cross_field(technique_id: str, clean: dict, messages: dict):
    if "key_env" in clean and not os.environ.get(clean["key_env"]):
        messages["key_env"] = (
            f"environment variable {clean['key_env']} is not set; "
            "secrets are passed by reference, never in the configuration"
        )
    if technique_id == "anon-ops.suppress":
        if clean.get("target", "whole-match") == "attributes" and not clean.get(
            "attributes"
        ):
            messages["attributes"] = "required when target is 'attributes'"
        for i, spec in enumerate(clean.get("atoms", [])):
            try:
                _convert_atom(spec)
            except (ValueError, Pc4pmError) as exc:
                messages[f"atoms[{i}]"] = str(exc)
        if clean.get("attributes") is not None and not all(
            isinstance(a, str) for a in clean.get("attributes") or []
        ):
            messages["attributes"] = "must be a list of attribute keys"
    elif technique_id == "anon-ops.generalize":
        has_granularity = "granularity" in clean
        has_taxonomy = "taxonomy" in clean
        if has_granularity == has_taxonomy:
            detail = "exactly one of 'granularity' or 'taxonomy' must be given"
            messages["granularity"] = detail
        elif has_taxonomy:
            try:
                _edges(clean["taxonomy"])
            except (ValueError, Pc4pmError) as exc:
                messages["taxonomy"] = str(exc)
    elif technique_id == "anon-ops.substitute":
        try:
            _convert_mapping(clean["mapping"], clean.get("value_kind", "string"))
        except (ValueError, Pc4pmError) as exc:
            messages["mapping"] = str(exc)
    elif technique_id == "anon-ops.pseudonymize":
        attrs = clean.get("attributes", [])
        if not attrs or not all(isinstance(a, str) for a in attrs):
            messages["attributes"] = "must be a non-empty list of attribute keys"


def _edges(rows) -> list:
    edges = []
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise ValueError("taxonomy rows are [child, parent] pairs")
        child, parent = row
        if not isinstance(child, str) or not isinstance(parent, str):
            raise ValueError("taxonomy values must be strings")
        edges.append((child, parent))
    # constructing validates the single-root/acyclic shape eagerly
    ops_mod.Taxonomy.from_edges(edges)
    return edges


def _key_from(clean: dict, mode: str) -> ops_mod.KeySpec:
    return ops_mod.KeySpec.from_env(clean["key_id"], clean["key_env"], mode)


# ---------------------------------------------------------------------------
# the runner


@dataclasses.dataclass
class Job:
    job_id: str
    technique: str
    input_id: str
    params: dict
    seed: int
    worker_count: int
    state: str = "queued"
    output_ids: tuple = ()
    error: Optional[str] = None
    submitted_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None

    def as_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "technique": self.technique,
            "input": self.input_id,
            "params": dict(self.params),
            "seed": self.seed,
            "worker_count": self.worker_count,
            "state": self.state,
            "outputs": list(self.output_ids),
            "error": self.error,
            "submitted_at": (
                format_timestamp(self.submitted_at) if self.submitted_at else None
            ),
            "finished_at": (
                format_timestamp(self.finished_at) if self.finished_at else None
            ),
        }


class JobRunner:
    def __init__(self, repo: Repository, max_workers: int = 2):
        self.repo = repo
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._jobs: dict = {}
        self._events: dict = {}
        self._lock = threading.Lock()

    def submit(
        self,
        technique_id: str,
        input_id: str,
        params: Optional[dict] = None,
        *,
        seed: int = 0,
        worker_count: int = 1,
    ) -> str:
        clean = validate_params(technique_id, dict(params or {}))
        entry = self.repo.get(input_id)
        if entry.kind != "xes":
            raise ParameterValidation(
                {"input": f"entry {input_id} is {entry.kind!r}; jobs run on event logs"}
            )
        if worker_count < 1:
            raise ParameterValidation({"worker_count": "must be at least 1"})
        job = Job(
            job_id=uuid.uuid4().hex[:12],
            technique=technique_id,
            input_id=input_id,
            params=clean,
            seed=seed,
            worker_count=worker_count,
            submitted_at=truncate_millis(datetime.now(timezone.utc)),
        )
        with self._lock:
            self._jobs[job.job_id] = job
            self._events[job.job_id] = threading.Event()
        self._pool.submit(self._execute, job.job_id)
        return job.job_id

    def status(self, job_id: str) -> dict:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                raise UnknownEntry(f"no job {job_id!r}")
            return job.as_dict()

    def list_jobs(self) -> list:
        with self._lock:
            return [j.as_dict() for j in self._jobs.values()]

    def wait(self, job_id: str, timeout: float = 120.0) -> dict:
        with self._lock:
            event = self._events.get(job_id)
        if event is None:
            raise UnknownEntry(f"no job {job_id!r}")
        if not event.wait(timeout):
            raise TimeoutError(f"job {job_id} still running after {timeout}s")
        return self.status(job_id)

    def shutdown(self):
        self._pool.shutdown(wait=True)

    # -- execution ----------------------------------------------------------

    def _execute(self, job_id: str):
        with self._lock:
            job = self._jobs[job_id]
            job.state = "running"
        try:
            outputs = self._run(job)
            with self._lock:
                job.output_ids = tuple(e.entry_id for e in outputs)
                job.state = "done"
        except Exception as exc:  # failures land in the status, not the pool
            with self._lock:
                job.error = f"{type(exc).__name__}: {exc}"
                job.state = "failed"
        finally:
            with self._lock:
                job.finished_at = truncate_millis(datetime.now(timezone.utc))
                self._events[job_id].set()

    def _run(self, job: Job) -> list:
        entry = self.repo.get(job.input_id)
        log = parse_xes(self.repo.content(job.input_id))
        p = job.params
        technique = job.technique
        workers = job.worker_count

        def store_log(out_log, suffix=""):
            return self.repo.store(
                write_xes(out_log),
                kind="xes",
                name=f"{technique}{suffix}({entry.name})",
                parents=(entry.entry_id,),
                technique=technique,
            )

        def store_abstraction(ela, suffix=""):
            header = dataclasses.replace(ela.header, origin_log_id=entry.entry_id)
            ela = dataclasses.replace(ela, header=header)
            return self.repo.store(
                write_ela(ela),
                kind="ela",
                name=f"{technique}{suffix}({entry.name})",
                parents=(entry.entry_id,),
                technique=technique,
            )

        if technique == "group-privacy":
            params = gp_mod.TlkcParams(
                t=p.get("t", "none"),
                l=p["l"],
                k=p["k"],
                c=p.get("c", 1.0),
                sensitive_attribute=p.get("sensitive_attribute"),
            )
            out = gp_mod.enforce(
                log, params, p["knowledge_kind"], job.seed, workers=workers
            )
            return [store_log(out)]
        if technique == "dp-engine":
            params = dp_mod.DpParams(
                epsilon=p["epsilon"],
                prune_threshold=p.get("prune_threshold", 0.0),
                max_variant_length=p.get("max_variant_length", 1000),
                seed=job.seed,
                secure_random=p.get("secure_random", False),
            )
            return [store_log(dp_mod.dp_publish(log, params, workers=workers))]
        if technique == "connector-dfg":
            key = _key_from(p, "pseudonymize-deterministic")
            return [store_abstraction(connector_mod.encode(log, key))]
        if technique == "role-miner":
            role_set, matrix_abs = roles_mod.privacy_aware_roles(
                log, p["noise_bound"], p["threshold"], job.seed, workers=workers
            )
            roleset_abs = roles_mod.roleset_abstraction(
                role_set, matrix_abs.header.privacy_metadata
            )
            return [
                store_abstraction(matrix_abs, suffix=".matrix"),
                store_abstraction(roleset_abs, suffix=".roles"),
            ]
        if technique == "anon-ops.suppress":
            selector = ops_mod.Selector(
                p["level"], tuple(_convert_atom(a) for a in p.get("atoms", []))
            )
            target = p.get("target", "whole-match")
            if target == "attributes":
                return [store_log(ops_mod.suppress(log, selector, frozenset(p["attributes"])))]
            return [store_log(ops_mod.suppress(log, selector))]
        if technique == "anon-ops.add_noise":
            out = ops_mod.add_noise(
                log, p["count"], p.get("generator", "replay-variant"), job.seed
            )
            return [store_log(out)]
        if technique == "anon-ops.substitute":
            mapping = _convert_mapping(p["mapping"], p.get("value_kind", "string"))
            out = ops_mod.substitute(
                log, p["attribute"], mapping, p.get("on_missing", "keep")
            )
            return [store_log(out)]
        if technique == "anon-ops.condense":
            out = ops_mod.condense(log, p["attribute"], p.get("grouping", "by-variant"))
            return [store_log(out)]
        if technique == "anon-ops.swap":
            out = ops_mod.swap(log, p["attribute"], p.get("scope", "global"), job.seed)
            return [store_log(out)]
        if technique == "anon-ops.generalize":
            if "granularity" in p:
                scheme = p["granularity"]
            else:
                scheme = ops_mod.Taxonomy.from_edges(_edges(p["taxonomy"]))
            return [store_log(ops_mod.generalize(log, p["attribute"], scheme))]
        if technique == "anon-ops.pseudonymize":
            key = _key_from(p, p.get("mode", "pseudonymize-deterministic"))
            return [store_log(ops_mod.pseudonymize(log, p["attributes"], key))]
        if technique == "anon-ops.de_pseudonymize":
            key = _key_from(p, "encrypt-recoverable")
            return [store_log(ops_mod.de_pseudonymize(log, key))]
        raise AssertionError(f"no dispatch for validated technique {technique!r}")
