"""XES event-log reading and writing (IEEE 1849-2016 XML).

The reader is built directly on expat so every schema complaint can point at a
line/column. The writer emits one canonical byte form per log: attribute maps
are serialized in sorted key order, timestamps in millisecond UTC form, and
privacy metadata as a nested log-level container keyed "privacy:metadata".
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.parsers import expat

from .errors import MalformedXml, ModelInvariantError, SchemaViolation
from .model import (
    ACTIVITY_KEY,
    TIMESTAMP_KEY,
    Classifier,
    Event,
    EventLog,
    Extension,
    OperationRecord,
    PrivacyMetadata,
    Trace,
    TypedValue,
)
from .util import format_timestamp, parse_timestamp

METADATA_KEY = "privacy:metadata"

_SCALAR_TAGS = {
    "string": "string",
    "date": "datetime",
    "int": "integer",
    "float": "real",
    "boolean": "boolean",
    "id": "id",
}

_KIND_TAGS = {kind: tag for tag, kind in _SCALAR_TAGS.items()}


class _Node:
    """Raw attribute element as parsed, before typing."""

    __slots__ = ("tag", "key", "text", "children", "line", "col")

    def __init__(self, tag, key, text, line, col):
        self.tag = tag
        self.key = key
        self.text = text
        self.children = []
        self.line = line
        self.col = col


def _typed_value(node: _Node) -> TypedValue:
    kind = _SCALAR_TAGS[node.tag]
    raw = node.text if node.text is not None else ""
    try:
        if kind == "string" or kind == "id":
            return TypedValue(kind, raw)
        if kind == "integer":
            return TypedValue.integer(int(raw))
        if kind == "real":
            return TypedValue.real(float(raw))
        if kind == "boolean":
            if raw not in ("true", "false"):
                raise ValueError(raw)
            return TypedValue.boolean(raw == "true")
        return TypedValue.timestamp(parse_timestamp(raw))
    except ValueError as exc:
        raise SchemaViolation(
            f"bad {kind} value for key {node.key!r}: {exc}", node.line, node.col
        ) from None


def _decode_metadata(node: _Node) -> PrivacyMetadata:
    records = []
    for child in node.children:
        if child.key != "record":
            raise SchemaViolation(
                f"unexpected element {child.key!r} in metadata container",
                child.line,
                child.col,
            )
        fields = {}
        targets = []
        for part in child.children:
            if part.tag == "list" and part.key == "target_attributes":
                targets = [t.text or "" for t in part.children]
            else:
                fields[part.key] = part.text or ""
        try:
            records.append(
                OperationRecord(
                    seq=len(records) + 1,
                    operation_kind=fields.get("operation_kind", ""),
                    level=fields.get("level", ""),
                    target_attributes=frozenset(targets),
                    parameter_digest=fields.get("parameter_digest", ""),
                    applied_at=parse_timestamp(fields.get("applied_at", "")),
                )
            )
        except (ValueError, ModelInvariantError) as exc:
            raise SchemaViolation(f"bad metadata record: {exc}", child.line, child.col) from None
    return PrivacyMetadata(tuple(records))


class _LogBuilder:
    """Expat handler that assembles the log while tracking element positions."""

    def __init__(self, parser):
        self.parser = parser
        self.stack = []  # (frame_kind, payload)
        self.log = None
        self.log_pos = (0, 0)

    def _pos(self):
        return self.parser.CurrentLineNumber, self.parser.CurrentColumnNumber

    def _fail(self, message):
        line, col = self._pos()
        raise SchemaViolation(message, line, col)

    def start(self, tag, attrs):
        line, col = self._pos()
        top = self.stack[-1][0] if self.stack else None

        if tag == "log":
            if top is not None:
                self._fail("nested <log> element")
            self.log_pos = (line, col)
            self.stack.append(
                (
                    "log",
                    {
                        "attrs": {},
                        "meta": PrivacyMetadata(),
                        "traces": [],
                        "extensions": [],
                        "classifiers": [],
                        "globals": {},
                    },
                )
            )
            return
        if top is None:
            self._fail(f"root element must be <log>, got <{tag}>")

        if top == "ignore":
            self.stack.append(("ignore", None))
            return

        if tag == "trace":
            if top != "log":
                self._fail("<trace> must sit directly under <log>")
            self.stack.append(("trace", {"attrs": {}, "events": [], "pos": (line, col)}))
        elif tag == "event":
            if top != "trace":
                self._fail("<event> must sit directly under <trace>")
            self.stack.append(("event", {"attrs": {}, "pos": (line, col)}))
        elif tag == "extension":
            if top != "log":
                self._fail("<extension> must sit directly under <log>")
            self.stack[-1][1]["extensions"].append(
                Extension(attrs.get("name", ""), attrs.get("prefix", ""), attrs.get("uri", ""))
            )
            self.stack.append(("ignore", None))
        elif tag == "classifier":
            if top != "log":
                self._fail("<classifier> must sit directly under <log>")
            keys = tuple(attrs.get("keys", "").split())
            self.stack[-1][1]["classifiers"].append(Classifier(attrs.get("name", ""), keys))
            self.stack.append(("ignore", None))
        elif tag == "global":
            if top != "log":
                self._fail("<global> must sit directly under <log>")
            scope = attrs.get("scope", "event")
            if scope not in ("trace", "event"):
                self._fail(f"global scope must be trace or event, got {scope!r}")
            self.stack.append(("global", {"scope": scope, "attrs": {}}))
        elif tag in _SCALAR_TAGS or tag == "list":
            if top not in ("log", "trace", "event", "global", "attr"):
                self._fail(f"attribute <{tag}> outside any container")
            node = _Node(tag, attrs.get("key", ""), attrs.get("value"), line, col)
            self.stack.append(("attr", node))
        else:
            self._fail(f"unexpected element <{tag}>")

    def end(self, tag):
        kind, payload = self.stack.pop()
        if kind == "ignore":
            return
        top_kind, top = self.stack[-1] if self.stack else (None, None)

        if kind == "attr":
            node = payload
            if top_kind == "attr":
                top.children.append(node)
                return
            if node.tag == "list":
                if top_kind == "log" and node.key == METADATA_KEY:
                    top["meta"] = _decode_metadata(node)
                # other list containers carry no scalar value; skipped
                return
            value = _typed_value(node)
            if top_kind == "global":
                top["attrs"][node.key] = value
            elif top_kind in ("log", "trace", "event"):
                top["attrs"][node.key] = value
            return

        if kind == "global":
            self.stack[-1][1]["globals"][payload["scope"]] = payload["attrs"]
            return

        if kind == "event":
            attrs = payload["attrs"]
            line, col = payload["pos"]
            act = attrs.get(ACTIVITY_KEY)
            if act is None or act.kind != "string" or not act.value:
                raise SchemaViolation("event lacks a string concept:name", line, col)
            ts = attrs.get(TIMESTAMP_KEY)
            if ts is None or ts.kind != "datetime":
                raise SchemaViolation("event lacks a datetime time:timestamp", line, col)
            top["events"].append((attrs, line, col))
            return

        if kind == "trace":
            attrs = payload["attrs"]
            line, col = payload["pos"]
            ordered = sorted(
                payload["events"], key=lambda item: item[0][TIMESTAMP_KEY].value
            )
            try:
                events = tuple(Event.from_payload(e[0]) for e in ordered)
            except ModelInvariantError as exc:
                raise SchemaViolation(str(exc), line, col) from None
            name = attrs.get(ACTIVITY_KEY)
            if name is not None and name.kind == "string" and name.value:
                case_id = name.value
            else:
                case_id = f"case-{len(top['traces']) + 1}"
                attrs = dict(attrs)
                attrs[ACTIVITY_KEY] = TypedValue.string(case_id)
            top["traces"].append((Trace(case_id=case_id, attributes=attrs, events=events), line, col))
            return

        if kind == "log":
            traces = []
            for trace, line, col in payload["traces"]:
                if any(t.case_id == trace.case_id for t in traces):
                    raise SchemaViolation(f"duplicate case_id {trace.case_id!r}", line, col)
                traces.append(trace)
            try:
                self.log = EventLog(
                    traces=tuple(traces),
                    attributes=payload["attrs"],
                    extensions=tuple(payload["extensions"]),
                    classifiers=tuple(payload["classifiers"]),
                    globals=payload["globals"],
                    privacy_metadata=payload["meta"],
                )
            except ModelInvariantError as exc:
                raise SchemaViolation(str(exc), *self.log_pos) from None


def parse_xes(raw) -> EventLog:
    """Parse XES bytes (or text) into an EventLog.

    Raises MalformedXml when the input is not well-formed XML and
    SchemaViolation when the log/trace/event structure or a value is broken;
    both carry the offending line/column.
    """
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    parser = expat.ParserCreate()
    builder = _LogBuilder(parser)
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.buffer_text = True
    try:
        parser.Parse(raw, True)
    except expat.ExpatError as exc:
        raise MalformedXml(
            expat.errors.messages[exc.code], exc.lineno, exc.offset
        ) from None
    if builder.log is None:
        raise SchemaViolation("document contains no <log> element", 1, 0)
    return builder.log


def _emit_attrs(parent, attrs):
    for key in sorted(attrs):
        tv = attrs[key]
        ET.SubElement(parent, _KIND_TAGS[tv.kind], key=key, value=tv.text())


def _emit_metadata(parent, meta: PrivacyMetadata):
    if not meta.records:
        return
    container = ET.SubElement(parent, "list", key=METADATA_KEY)
    for rec in meta.records:
        entry = ET.SubElement(container, "string", key="record", value=str(rec.seq))
        ET.SubElement(entry, "string", key="operation_kind", value=rec.operation_kind)
        ET.SubElement(entry, "string", key="level", value=rec.level)
        ET.SubElement(entry, "string", key="applied_at", value=format_timestamp(rec.applied_at))
        ET.SubElement(entry, "string", key="parameter_digest", value=rec.parameter_digest)
        targets = ET.SubElement(entry, "list", key="target_attributes")
        for name in sorted(rec.target_attributes):
            ET.SubElement(targets, "string", key="attribute", value=name)


def write_xes(log: EventLog) -> bytes:
    """Serialize a log to canonical XES bytes (equal logs yield equal bytes)."""
    root = ET.Element("log", {"xes.version": "1849-2016", "xes.features": "nested-attributes"})
    for ext in log.extensions:
        ET.SubElement(root, "extension", name=ext.name, prefix=ext.prefix, uri=ext.uri)
    for scope in sorted(log.globals):
        holder = ET.SubElement(root, "global", scope=scope)
        _emit_attrs(holder, log.globals[scope])
    for cls in log.classifiers:
        ET.SubElement(root, "classifier", name=cls.name, keys=" ".join(cls.keys))
    _emit_attrs(root, log.attributes)
    _emit_metadata(root, log.privacy_metadata)
    for trace in log.traces:
        t_el = ET.SubElement(root, "trace")
        _emit_attrs(t_el, trace.attributes)
        for event in trace.events:
            e_el = ET.SubElement(t_el, "event")
            _emit_attrs(e_el, event.payload)
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"
