"""In-memory event-log model.

Every value here is immutable after construction; transformations return new
objects, which is what lets log passes run concurrently over disjoint trace
partitions without locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .errors import ModelInvariantError
from .util import EPOCH, digest, truncate_millis

ACTIVITY_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"
RESOURCE_KEY = "org:resource"

KINDS = ("string", "integer", "real", "boolean", "datetime", "id")

OPERATION_KINDS = (
    "suppression",
    "addition",
    "substitution",
    "condensation",
    "swapping",
    "generalization",
    "cryptography",
)

OPERATION_LEVELS = ("event", "trace", "attribute", "log")

STANDARD_EXTENSIONS = (
    ("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
    ("Time", "time", "http://www.xes-standard.org/time.xesext"),
    ("Organizational", "org", "http://www.xes-standard.org/org.xesext"),
)


@dataclass(frozen=True)
class TypedValue:
    """A typed attribute payload; kind and value always agree."""

    kind: str
    value: object

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelInvariantError(f"unknown value kind: {self.kind!r}")
        expected = {
            "string": str,
            "integer": int,
            "real": float,
            "boolean": bool,
            "datetime": datetime,
            "id": str,
        }[self.kind]
        if self.kind == "integer" and isinstance(self.value, bool):
            raise ModelInvariantError("integer value must not be bool")
        if not isinstance(self.value, expected):
            raise ModelInvariantError(
                f"{self.kind} value has payload type {type(self.value).__name__}"
            )
        if self.kind == "datetime":
            object.__setattr__(self, "value", truncate_millis(self.value))

    @classmethod
    def string(cls, v: str) -> "TypedValue":
        return cls("string", v)

    @classmethod
    def integer(cls, v: int) -> "TypedValue":
        return cls("integer", int(v))

    @classmethod
    def real(cls, v: float) -> "TypedValue":
        return cls("real", float(v))

    @classmethod
    def boolean(cls, v: bool) -> "TypedValue":
        return cls("boolean", bool(v))

    @classmethod
    def timestamp(cls, v: datetime) -> "TypedValue":
        return cls("datetime", v)

    @classmethod
    def identifier(cls, v: str) -> "TypedValue":
        return cls("id", v)

    def text(self) -> str:
        """Canonical textual form (the one used on the wire and for hashing)."""
        if self.kind == "datetime":
            from .util import format_timestamp

            return format_timestamp(self.value)
        if self.kind == "boolean":
            return "true" if self.value else "false"
        if self.kind == "real":
            return repr(self.value)
        return str(self.value)


def _frozen_map(m: Optional[Mapping]) -> dict:
    return dict(m) if m else {}


@dataclass(frozen=True)
class Event:
    """One process step: activity plus timestamp, resource and extra payload.

    The payload map always carries the standard keys (concept:name,
    time:timestamp, org:resource when a resource is set), so generic
    attribute-level passes never need to special-case the main fields.
    """

    activity: str
    timestamp: datetime
    resource: Optional[str] = None
    payload: Mapping[str, TypedValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise ModelInvariantError("event activity must be non-empty")
        object.__setattr__(self, "timestamp", truncate_millis(self.timestamp))
        payload = dict(self.payload)
        payload.setdefault(ACTIVITY_KEY, TypedValue.string(self.activity))
        payload.setdefault(TIMESTAMP_KEY, TypedValue.timestamp(self.timestamp))
        if self.resource is not None:
            payload.setdefault(RESOURCE_KEY, TypedValue.string(self.resource))
        object.__setattr__(self, "payload", payload)
        if payload[ACTIVITY_KEY] != TypedValue.string(self.activity):
            raise ModelInvariantError("payload concept:name disagrees with activity")
        if payload[TIMESTAMP_KEY] != TypedValue.timestamp(self.timestamp):
            raise ModelInvariantError("payload time:timestamp disagrees with timestamp")
        if (self.resource is None) != (RESOURCE_KEY not in payload):
            raise ModelInvariantError("payload org:resource disagrees with resource")
        if self.resource is not None and payload[RESOURCE_KEY] != TypedValue.string(self.resource):
            raise ModelInvariantError("payload org:resource disagrees with resource")

    @classmethod
    def from_payload(cls, payload: Mapping[str, TypedValue]) -> "Event":
        """Build an event whose main fields are read off the payload map."""
        act = payload.get(ACTIVITY_KEY)
        ts = payload.get(TIMESTAMP_KEY)
        if act is None or act.kind != "string":
            raise ModelInvariantError("payload lacks a string concept:name")
        if ts is None or ts.kind != "datetime":
            raise ModelInvariantError("payload lacks a datetime time:timestamp")
        res = payload.get(RESOURCE_KEY)
        if res is not None and res.kind != "string":
            raise ModelInvariantError("org:resource must be a string attribute")
        return cls(
            activity=act.value,
            timestamp=ts.value,
            resource=res.value if res is not None else None,
            payload=dict(payload),
        )


@dataclass(frozen=True)
class Trace:
    """The ordered events of one case."""

    case_id: str
    attributes: Mapping[str, TypedValue] = field(default_factory=dict)
    events: Sequence[Event] = ()

    def __post_init__(self):
        if not self.case_id:
            raise ModelInvariantError("trace case_id must be non-empty")
        attrs = dict(self.attributes)
        attrs.setdefault(ACTIVITY_KEY, TypedValue.string(self.case_id))
        object.__setattr__(self, "attributes", attrs)
        if attrs[ACTIVITY_KEY] != TypedValue.string(self.case_id):
            raise ModelInvariantError("trace concept:name disagrees with case_id")
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        for prev, cur in zip(events, events[1:]):
            if cur.timestamp < prev.timestamp:
                raise ModelInvariantError(
                    f"trace {self.case_id}: events not in timestamp order"
                )

    @property
    def variant(self) -> tuple:
        return tuple(e.activity for e in self.events)


class Extension(NamedTuple):
    name: str
    prefix: str
    uri: str


class Classifier(NamedTuple):
    name: str
    keys: tuple


@dataclass(frozen=True)
class OperationRecord:
    """One applied anonymization operation, as recorded in privacy metadata."""

    seq: int
    operation_kind: str
    level: str
    target_attributes: frozenset
    parameter_digest: str
    applied_at: datetime

    def __post_init__(self):
        if self.seq < 1:
            raise ModelInvariantError("record seq must be positive")
        if self.operation_kind not in OPERATION_KINDS:
            raise ModelInvariantError(f"unknown operation kind: {self.operation_kind!r}")
        if self.level not in OPERATION_LEVELS:
            raise ModelInvariantError(f"unknown operation level: {self.level!r}")
        object.__setattr__(self, "target_attributes", frozenset(self.target_attributes))
        object.__setattr__(self, "applied_at", truncate_millis(self.applied_at))


@dataclass(frozen=True)
class PrivacyMetadata:
    """Append-only, ordered record of the operations applied to a log."""

    records: Sequence[OperationRecord] = ()

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        for i, rec in enumerate(records, start=1):
            if rec.seq != i:
                raise ModelInvariantError(
                    f"metadata seq values must be contiguous: got {rec.seq} at position {i}"
                )

    def __len__(self):
        return len(self.records)

    def append(
        self,
        operation_kind: str,
        level: str,
        target_attributes: Iterable = (),
        parameter_digest: str = "",
        applied_at: datetime = EPOCH,
    ) -> "PrivacyMetadata":
        rec = OperationRecord(
            seq=len(self.records) + 1,
            operation_kind=operation_kind,
            level=level,
            target_attributes=frozenset(target_attributes),
            parameter_digest=parameter_digest,
            applied_at=applied_at,
        )
        return PrivacyMetadata(self.records + (rec,))


@dataclass(frozen=True)
class EventLog:
    """A set of traces plus log-level declarations and privacy metadata."""

    traces: Sequence[Trace] = ()
    attributes: Mapping[str, TypedValue] = field(default_factory=dict)
    extensions: Sequence[Extension] = ()
    classifiers: Sequence[Classifier] = ()
    globals: Mapping[str, Mapping[str, TypedValue]] = field(default_factory=dict)
    privacy_metadata: PrivacyMetadata = PrivacyMetadata()

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        object.__setattr__(self, "attributes", dict(self.attributes))
        object.__setattr__(self, "extensions", tuple(Extension(*e) for e in self.extensions))
        object.__setattr__(
            self,
            "classifiers",
            tuple(Classifier(c[0], tuple(c[1])) for c in self.classifiers),
        )
        object.__setattr__(
            self, "globals", {scope: dict(m) for scope, m in self.globals.items()}
        )
        seen = set()
        for trace in self.traces:
            if trace.case_id in seen:
                raise ModelInvariantError(f"duplicate case_id: {trace.case_id!r}")
            seen.add(trace.case_id)
        for key in self.globals.get("event", {}):
            for trace in self.traces:
                for event in trace.events:
                    if key not in event.payload:
                        raise ModelInvariantError(
                            f"global event attribute {key!r} missing in case {trace.case_id!r}"
                        )
        for key in self.globals.get("trace", {}):
            for trace in self.traces:
                if key not in trace.attributes:
                    raise ModelInvariantError(
                        f"global trace attribute {key!r} missing in case {trace.case_id!r}"
                    )

    @classmethod
    def create(
        cls,
        traces: Sequence[Trace] = (),
        name: Optional[str] = None,
        attributes: Optional[Mapping[str, TypedValue]] = None,
        privacy_metadata: PrivacyMetadata = PrivacyMetadata(),
    ) -> "EventLog":
        """New log with the standard extension declarations and sane globals."""
        attrs = _frozen_map(attributes)
        if name is not None:
            attrs.setdefault(ACTIVITY_KEY, TypedValue.string(name))
        return cls(
            traces=tuple(traces),
            attributes=attrs,
            extensions=STANDARD_EXTENSIONS,
            classifiers=(Classifier("Activity", (ACTIVITY_KEY,)),),
            globals={
                "trace": {ACTIVITY_KEY: TypedValue.string("")},
                "event": {
                    ACTIVITY_KEY: TypedValue.string(""),
                    TIMESTAMP_KEY: TypedValue.timestamp(EPOCH),
                },
            },
            privacy_metadata=privacy_metadata,
        )

    @property
    def event_count(self) -> int:
        return sum(len(t.events) for t in self.traces)

    def alphabet(self) -> set:
        return {e.activity for t in self.traces for e in t.events}

    def with_traces(self, traces: Sequence[Trace]) -> "EventLog":
        return replace(self, traces=tuple(traces))


@dataclass(frozen=True)
class AbstractionHeader:
    abstraction_kind: str
    origin_log_id: str
    technique: str
    privacy_metadata: PrivacyMetadata = PrivacyMetadata()

    def __post_init__(self):
        if not self.abstraction_kind:
            raise ModelInvariantError("abstraction_kind must be non-empty")


@dataclass(frozen=True)
class EventLogAbstraction:
    """Non-XES tabular artifact derived from a log (its own header travels with it)."""

    header: AbstractionHeader
    columns: Sequence[str] = ()
    rows: Sequence[tuple] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for i, row in enumerate(rows):
            if len(row) != len(self.columns):
                raise ModelInvariantError(
                    f"row {i} arity {len(row)} != column arity {len(self.columns)}"
                )
            for cell in row:
                if not isinstance(cell, TypedValue):
                    raise ModelInvariantError("abstraction cells must be TypedValue")


@dataclass(frozen=True)
class DirectlyFollowsGraph:
    """Directly-follows pair counts plus per-trace start/end frequencies."""

    pair_counts: Mapping[tuple, int] = field(default_factory=dict)
    start_counts: Mapping[str, int] = field(default_factory=dict)
    end_counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for m in (self.pair_counts, self.start_counts, self.end_counts):
            for key, count in m.items():
                if count < 1:
                    raise ModelInvariantError(f"count for {key!r} must be positive")
        object.__setattr__(self, "pair_counts", dict(self.pair_counts))
        object.__setattr__(self, "start_counts", dict(self.start_counts))
        object.__setattr__(self, "end_counts", dict(self.end_counts))


def default_applied_at(log: EventLog) -> datetime:
    """Deterministic stamping instant for operation records.

    Derived from the data (latest event timestamp) rather than the wall clock
    so that rerunning a pipeline on the same input reproduces identical bytes.
    """
    stamps = [e.timestamp for t in log.traces for e in t.events]
    return max(stamps) if stamps else EPOCH


def attach_operation_record(
    log: EventLog,
    operation_kind: str,
    level: str,
    target_attributes: Iterable = (),
    parameters: Optional[dict] = None,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Copy of `log` with one more operation record (seq = previous length + 1)."""
    meta = log.privacy_metadata.append(
        operation_kind=operation_kind,
        level=level,
        target_attributes=target_attributes,
        parameter_digest=digest(parameters or {}),
        applied_at=applied_at if applied_at is not None else default_applied_at(log),
    )
    return replace(log, privacy_metadata=meta)
