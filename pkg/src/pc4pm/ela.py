"""Event-log abstraction (.ela) reading and writing.

An abstraction is a single structured-text (JSON) document with a mandatory
header section (abstraction_kind, origin_log_id, technique, privacy_metadata)
followed by a typed table: column names plus rows of [kind, value] cells.
"""

from __future__ import annotations

import json

from .errors import MalformedAbstraction, ModelInvariantError
from .model import (
    AbstractionHeader,
    EventLogAbstraction,
    OperationRecord,
    PrivacyMetadata,
    TypedValue,
)
from .util import format_timestamp, parse_timestamp

_HEADER_FIELDS = ("abstraction_kind", "origin_log_id", "technique", "privacy_metadata")


def record_to_dict(rec: OperationRecord) -> dict:
    return {
        "seq": rec.seq,
        "operation_kind": rec.operation_kind,
        "level": rec.level,
        "target_attributes": sorted(rec.target_attributes),
        "parameter_digest": rec.parameter_digest,
        "applied_at": format_timestamp(rec.applied_at),
    }


def record_from_dict(data: dict) -> OperationRecord:
    return OperationRecord(
        seq=int(data["seq"]),
        operation_kind=data["operation_kind"],
        level=data["level"],
        target_attributes=frozenset(data.get("target_attributes", ())),
        parameter_digest=data.get("parameter_digest", ""),
        applied_at=parse_timestamp(data["applied_at"]),
    )


def _cell_to_json(tv: TypedValue):
    if tv.kind == "datetime":
        return [tv.kind, format_timestamp(tv.value)]
    return [tv.kind, tv.value]


def _cell_from_json(cell) -> TypedValue:
    kind, value = cell
    if kind == "datetime":
        return TypedValue.timestamp(parse_timestamp(value))
    if kind == "real":
        value = float(value)
    return TypedValue(kind, value)


def write_ela(ela: EventLogAbstraction) -> bytes:
    doc = {
        "header": {
            "abstraction_kind": ela.header.abstraction_kind,
            "origin_log_id": ela.header.origin_log_id,
            "technique": ela.header.technique,
            "privacy_metadata": [record_to_dict(r) for r in ela.header.privacy_metadata.records],
        },
        "columns": list(ela.columns),
        "rows": [[_cell_to_json(cell) for cell in row] for row in ela.rows],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def parse_ela(raw) -> EventLogAbstraction:
    """Parse .ela bytes; MalformedAbstraction on structural problems."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedAbstraction(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "header" not in doc:
        raise MalformedAbstraction("document lacks a header section")
    header = doc["header"]
    for name in _HEADER_FIELDS:
        if name not in header:
            raise MalformedAbstraction(f"header lacks mandatory field {name!r}")
    try:
        meta = PrivacyMetadata(
            tuple(record_from_dict(r) for r in header["privacy_metadata"])
        )
        parsed_header = AbstractionHeader(
            abstraction_kind=header["abstraction_kind"],
            origin_log_id=header["origin_log_id"],
            technique=header["technique"],
            privacy_metadata=meta,
        )
        columns = tuple(doc.get("columns", ()))
        rows = tuple(
            tuple(_cell_from_json(cell) for cell in row) for row in doc.get("rows", ())
        )
        return EventLogAbstraction(header=parsed_header, columns=columns, rows=rows)
    except (ModelInvariantError, KeyError, ValueError, TypeError) as exc:
        raise MalformedAbstraction(str(exc)) from None
