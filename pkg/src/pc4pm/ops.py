"""The seven anonymization operations, each a pure log -> log transformation.

Every operation validates its inputs, leaves the input log untouched, and
returns a copy with exactly one more privacy-metadata record.  Seeded
operations derive an independent random stream per trace (or per swap scope)
from the seed plus a stable context string, so results never depend on
evaluation order.
"""

from __future__ import annotations

import base64
import binascii
import csv
import hashlib
import hmac
import math
import os
import random
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESSIV

from .errors import (
    DecryptionFailure,
    EmptyResult,
    ModelInvariantError,
    ParseFailure,
    PseudonymCollision,
    SelectorTypeError,
    UnknownAttribute,
    UnknownValue,
)
from .model import (
    ACTIVITY_KEY,
    KINDS,
    RESOURCE_KEY,
    TIMESTAMP_KEY,
    Event,
    EventLog,
    Trace,
    TypedValue,
    attach_operation_record,
)
from .stats import TimingPools, df_graph
from .util import derived_seed, parse_timestamp


# ---------------------------------------------------------------------------
# selectors

_COMPARATOR_ALIASES = {"==": "=", "≠": "!=", "≤": "<=", "≥": ">="}
_COMPARATORS = ("=", "!=", "<", "<=", ">", ">=", "in")
_ORDERABLE_KINDS = ("string", "integer", "real", "datetime")


@dataclass(frozen=True)
class Atom:
    """One comparison `attribute <op> value`; `in` takes a set of values."""

    key: str
    comparator: str
    value: object

    def __post_init__(self):
        comp = _COMPARATOR_ALIASES.get(self.comparator, self.comparator)
        object.__setattr__(self, "comparator", comp)
        if comp not in _COMPARATORS:
            raise SelectorTypeError(f"unknown comparator: {self.comparator!r}")
        if comp == "in":
            members = tuple(self.value)
            if not members or not all(isinstance(v, TypedValue) for v in members):
                raise SelectorTypeError("in-set needs a non-empty set of typed values")
            object.__setattr__(self, "value", members)
        elif not isinstance(self.value, TypedValue):
            raise SelectorTypeError("comparison value must be a TypedValue")

    def _check_kind(self, present: TypedValue, expected: TypedValue):
        if present.kind != expected.kind:
            raise SelectorTypeError(
                f"attribute {self.key!r} has kind {present.kind}, "
                f"selector compares against {expected.kind}"
            )

    def matches(self, attrs: Mapping[str, TypedValue]) -> bool:
        present = attrs.get(self.key)
        if present is None:
            return False
        if self.comparator == "in":
            for member in self.value:
                self._check_kind(present, member)
            return any(present.value == m.value for m in self.value)
        self._check_kind(present, self.value)
        a, b = present.value, self.value.value
        if self.comparator == "=":
            return a == b
        if self.comparator == "!=":
            return a != b
        if present.kind not in _ORDERABLE_KINDS:
            raise SelectorTypeError(
                f"{present.kind} values cannot be ordered (attribute {self.key!r})"
            )
        if self.comparator == "<":
            return a < b
        if self.comparator == "<=":
            return a <= b
        if self.comparator == ">":
            return a > b
        return a >= b


@dataclass(frozen=True)
class Selector:
    """A conjunction of atoms evaluated over events or over whole traces."""

    level: str
    atoms: Sequence[Atom] = ()

    def __post_init__(self):
        if self.level not in ("event", "trace"):
            raise SelectorTypeError(
                f"selector level must be 'event' or 'trace', got {self.level!r}"
            )
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def keys(self) -> frozenset:
        return frozenset(atom.key for atom in self.atoms)

    def matches(self, attrs: Mapping[str, TypedValue]) -> bool:
        return all(atom.matches(attrs) for atom in self.atoms)


def _atom_params(atom: Atom):
    if atom.comparator == "in":
        return [atom.key, "in", sorted([m.kind, m.text()] for m in atom.value)]
    return [atom.key, atom.comparator, atom.value.kind, atom.value.text()]


def _selector_params(selector: Selector) -> dict:
    return {
        "level": selector.level,
        "atoms": sorted(_atom_params(a) for a in selector.atoms),
    }


# ---------------------------------------------------------------------------
# taxonomies and keys

@dataclass(frozen=True)
class Taxonomy:
    """A rooted value tree stored as a child -> parent map."""

    parents: Mapping[str, str]

    def __post_init__(self):
        parents = dict(self.parents)
        object.__setattr__(self, "parents", parents)
        if not parents:
            return
        roots = set(parents.values()) - set(parents)
        if not roots:
            raise ModelInvariantError("taxonomy has a cycle (no root value)")
        if len(roots) > 1:
            raise ModelInvariantError(
                f"taxonomy must have a single root, found {sorted(roots)}"
            )
        for start in parents:
            seen = {start}
            node = start
            while node in parents:
                node = parents[node]
                if node in seen:
                    raise ModelInvariantError(f"taxonomy cycle through {node!r}")
                seen.add(node)

    @property
    def root(self) -> Optional[str]:
        roots = set(self.parents.values()) - set(self.parents)
        return next(iter(roots)) if roots else None

    def parent_of(self, value: str) -> Optional[str]:
        return self.parents.get(value)

    @classmethod
    def from_edges(cls, edges: Iterable) -> "Taxonomy":
        parents = {}
        for child, parent in edges:
            if child in parents and parents[child] != parent:
                raise ModelInvariantError(f"value {child!r} has two parents")
            parents[child] = parent
        return cls(parents)

    @classmethod
    def from_csv(cls, path) -> "Taxonomy":
        """Load a two-column child,parent edge list (optional header row)."""
        edges = []
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != 2:
                    raise ParseFailure(
                        f"{path}:{lineno}: expected two columns child,parent"
                    )
                child, parent = (cell.strip() for cell in row)
                if lineno == 1 and (child.lower(), parent.lower()) == ("child", "parent"):
                    continue
                edges.append((child, parent))
        return cls.from_edges(edges)


KEY_MODES = ("pseudonymize-deterministic", "encrypt-recoverable")


@dataclass(frozen=True)
class KeySpec:
    """A named secret for the cryptography operation.  Never serialized."""

    key_id: str
    secret: bytes
    mode: str = "pseudonymize-deterministic"

    def __post_init__(self):
        if not self.key_id:
            raise ModelInvariantError("key_id must be non-empty")
        if not isinstance(self.secret, (bytes, bytearray)):
            raise ModelInvariantError("secret must be a byte sequence")
        if len(self.secret) < 16:
            raise ModelInvariantError("secret must be at least 16 bytes")
        object.__setattr__(self, "secret", bytes(self.secret))
        if self.mode not in KEY_MODES:
            raise ModelInvariantError(f"unknown key mode: {self.mode!r}")

    def __repr__(self):
        return (
            f"KeySpec(key_id={self.key_id!r}, mode={self.mode!r}, "
            f"secret=<{len(self.secret)} bytes>)"
        )

    @classmethod
    def from_env(cls, key_id: str, env_var: str, mode: str = "pseudonymize-deterministic"):
        raw = os.environ.get(env_var)
        if not raw:
            raise ModelInvariantError(f"environment variable {env_var} is not set")
        return cls(key_id=key_id, secret=raw.encode("utf-8"), mode=mode)


# ---------------------------------------------------------------------------
# shared plumbing

def _known_keys(log: EventLog) -> set:
    keys = set(log.attributes)
    for scope_map in log.globals.values():
        keys.update(scope_map)
    for trace in log.traces:
        keys.update(trace.attributes)
        for event in trace.events:
            keys.update(event.payload)
    return keys


def _require_keys(log: EventLog, keys: Iterable):
    known = _known_keys(log)
    for key in sorted(keys):
        if key not in known:
            raise UnknownAttribute(f"attribute {key!r} is not present in the log")


def _retrace(trace: Trace, attrs: Mapping, events: Sequence[Event]) -> Trace:
    cid = trace.case_id
    tv = attrs.get(ACTIVITY_KEY)
    if tv is not None and tv.kind == "string":
        cid = tv.value
    return Trace(case_id=cid, attributes=attrs, events=tuple(events))


def _rewrite_occurrences(log, keys, fn, include_log_attrs=True):
    """Apply fn(trace_or_None, key, value) to every occurrence of the keys.

    Covers log attributes (trace argument None), trace attributes and event
    payloads.  fn returning the same object means "leave unchanged".
    """

    def rewrite_map(owner, m):
        out, changed = dict(m), False
        for key in keys:
            if key in out:
                new = fn(owner, key, out[key])
                if new is not out[key]:
                    out[key] = new
                    changed = True
        return out if changed else m

    log_attrs = rewrite_map(None, log.attributes) if include_log_attrs else log.attributes
    traces = []
    for trace in log.traces:
        attrs = rewrite_map(trace, trace.attributes)
        dirty = attrs is not trace.attributes
        events = []
        for event in trace.events:
            payload = rewrite_map(trace, event.payload)
            if payload is not event.payload:
                event = Event.from_payload(payload)
                dirty = True
            events.append(event)
        traces.append(_retrace(trace, attrs, events) if dirty else trace)
    return replace(log, attributes=log_attrs, traces=tuple(traces))


# ---------------------------------------------------------------------------
# suppression

def suppress(
    log: EventLog,
    selector: Selector,
    target: Union[str, Iterable] = "whole-match",
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Remove matching events/traces, or strip named attributes off matches."""
    _require_keys(log, selector.keys())
    if target == "whole-match":
        if selector.level == "event":
            traces = []
            for trace in log.traces:
                kept = tuple(e for e in trace.events if not selector.matches(e.payload))
                traces.append(
                    trace if len(kept) == len(trace.events) else replace(trace, events=kept)
                )
        else:
            traces = [t for t in log.traces if not selector.matches(t.attributes)]
        out = log.with_traces(traces)
        level = selector.level
        targets = selector.keys()
        target_param = "whole-match"
    else:
        keys = frozenset(target)
        if not keys:
            raise ModelInvariantError("attribute target must name at least one key")
        _require_keys(log, keys)
        protected = {ACTIVITY_KEY, TIMESTAMP_KEY} if selector.level == "event" else {ACTIVITY_KEY}
        clash = keys & protected
        if clash:
            raise ModelInvariantError(
                f"cannot suppress mandatory attribute(s): {sorted(clash)}"
            )
        traces = []
        if selector.level == "event":
            for trace in log.traces:
                events, dirty = [], False
                for event in trace.events:
                    if selector.matches(event.payload) and keys & set(event.payload):
                        payload = {k: v for k, v in event.payload.items() if k not in keys}
                        event = Event.from_payload(payload)
                        dirty = True
                    events.append(event)
                traces.append(replace(trace, events=tuple(events)) if dirty else trace)
        else:
            for trace in log.traces:
                if selector.matches(trace.attributes) and keys & set(trace.attributes):
                    attrs = {k: v for k, v in trace.attributes.items() if k not in keys}
                    trace = replace(trace, attributes=attrs)
                traces.append(trace)
        # a suppressed attribute can no longer be promised for every element
        scope = selector.level
        new_globals = {
            s: ({k: v for k, v in m.items() if k not in keys} if s == scope else m)
            for s, m in log.globals.items()
        }
        out = replace(log, traces=tuple(traces), globals=new_globals)
        level = "attribute"
        targets = keys
        target_param = sorted(keys)
    params = {"selector": _selector_params(selector), "target": target_param}
    return attach_operation_record(out, "suppression", level, targets, params, applied_at)


# ---------------------------------------------------------------------------
# addition

def _weighted_choice(rng: random.Random, options):
    """options: sequence of (item, weight) with positive integer weights."""
    total = sum(w for _, w in options)
    pick = rng.randrange(total)
    for item, weight in options:
        pick -= weight
        if pick < 0:
            return item
    return options[-1][0]


def add_noise(
    log: EventLog,
    count: int,
    generator: str = "replay-variant",
    seed: int = 0,
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Append `count` synthetic traces drawn from the log's own behaviour.

    replay-variant copies the control flow of an existing trace; random-walk
    follows the directly-follows graph from a start activity to an end.
    Synthetic traces are not marked in the data; only the count is recorded.
    """
    if count < 0:
        raise ModelInvariantError("count must be non-negative")
    if generator not in ("replay-variant", "random-walk"):
        raise ModelInvariantError(f"unknown generator: {generator!r}")

    def stamp(out):
        return attach_operation_record(out, "addition", "log", (), {"count": count}, applied_at)

    if count == 0:
        return stamp(log)
    if not log.alphabet():
        raise EmptyResult("cannot synthesize traces from a log without events")

    existing = {t.case_id for t in log.traces}
    pools = TimingPools(log)
    canon = lambda tv: (tv.kind, tv.text())

    resource_pool = defaultdict(list)
    for trace in log.traces:
        for event in trace.events:
            if event.resource is not None:
                resource_pool[event.activity].append(event.resource)
    resource_pool = {a: sorted(rs) for a, rs in resource_pool.items()}

    extra_event_keys = [
        k
        for k in log.globals.get("event", {})
        if k not in (ACTIVITY_KEY, TIMESTAMP_KEY, RESOURCE_KEY)
    ]
    extra_trace_keys = [k for k in log.globals.get("trace", {}) if k != ACTIVITY_KEY]
    event_pool = {
        k: sorted(
            (e.payload[k] for t in log.traces for e in t.events), key=canon
        )
        for k in extra_event_keys
    }
    trace_pool = {
        k: sorted((t.attributes[k] for t in log.traces), key=canon)
        for k in extra_trace_keys
    }

    variants = [t.variant for t in log.traces if t.events]
    dfg = df_graph(log)
    outgoing = defaultdict(list)
    for (a, b), n in sorted(dfg.pair_counts.items()):
        outgoing[a].append((b, n))
    max_len = max((len(t.events) for t in log.traces), default=0)
    walk_cap = max(2 * max_len, 8)

    def walk_activities(rng):
        starts = sorted(dfg.start_counts.items())
        current = _weighted_choice(rng, starts)
        path = [current]
        while len(path) < walk_cap:
            options = [(("go", b), n) for b, n in outgoing.get(current, [])]
            stop_weight = dfg.end_counts.get(current, 0)
            if stop_weight:
                options.append((("stop", None), stop_weight))
            if not options:
                break
            action, nxt = _weighted_choice(rng, options)
            if action == "stop":
                break
            current = nxt
            path.append(current)
        return path

    def fresh_case_ids(n):
        ids, i = [], 1
        while len(ids) < n:
            cid = f"syn-{i}"
            if cid not in existing:
                ids.append(cid)
            i += 1
        return ids

    new_traces = list(log.traces)
    for cid in fresh_case_ids(count):
        rng = random.Random(derived_seed(seed, cid))
        if generator == "replay-variant":
            activities = list(variants[rng.randrange(len(variants))]) if variants else []
        else:
            activities = walk_activities(rng)
        events = []
        ts = pools.sample_start(rng)
        prev = None
        for act in activities:
            if prev is not None:
                ts = ts + timedelta(milliseconds=pools.sample_delay_ms(rng, (prev, act)))
            payload = {}
            for k in extra_event_keys:
                pool = event_pool[k]
                payload[k] = pool[rng.randrange(len(pool))]
            pool = resource_pool.get(act)
            resource = pool[rng.randrange(len(pool))] if pool else None
            events.append(Event(activity=act, timestamp=ts, resource=resource, payload=payload))
            prev = act
        attrs = {}
        for k in extra_trace_keys:
            pool = trace_pool[k]
            attrs[k] = pool[rng.randrange(len(pool))]
        new_traces.append(Trace(case_id=cid, attributes=attrs, events=tuple(events)))
    return stamp(log.with_traces(new_traces))


# ---------------------------------------------------------------------------
# substitution

def substitute(
    log: EventLog,
    attribute: str,
    mapping: Mapping,
    on_missing: str = "keep",
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Replace every occurrence of a mapped value of the attribute."""
    if on_missing not in ("keep", "error"):
        raise ModelInvariantError(f"on_missing must be 'keep' or 'error', got {on_missing!r}")
    _require_keys(log, [attribute])
    mapping = dict(mapping)

    def rewrite(owner, key, tv):
        if tv.value in mapping:
            return TypedValue(tv.kind, mapping[tv.value])
        if on_missing == "error":
            raise UnknownValue(f"no substitute for {key!r} value {tv.value!r}")
        return tv

    out = _rewrite_occurrences(log, [attribute], rewrite)
    params = {
        "attribute": attribute,
        "mapping": sorted((str(k), str(v)) for k, v in mapping.items()),
        "on_missing": on_missing,
    }
    return attach_operation_record(out, "substitution", "attribute", {attribute}, params, applied_at)


# ---------------------------------------------------------------------------
# condensation

def condense(
    log: EventLog,
    attribute: str,
    grouping: str = "by-variant",
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Replace each value by its group mean (groups = traces of one variant).

    Real values take the arithmetic mean; integer values take the mean rounded
    half-up, so the attribute keeps its kind.
    """
    if grouping != "by-variant":
        raise ModelInvariantError(f"unknown grouping: {grouping!r}")
    _require_keys(log, [attribute])

    groups = defaultdict(list)
    for trace in log.traces:
        values = []
        if attribute in trace.attributes:
            values.append(trace.attributes[attribute])
        for event in trace.events:
            if attribute in event.payload:
                values.append(event.payload[attribute])
        for tv in values:
            if tv.kind not in ("integer", "real"):
                raise SelectorTypeError(
                    f"condensation needs a numeric attribute; {attribute!r} has kind {tv.kind}"
                )
            groups[trace.variant].append(Fraction(tv.value))

    means = {
        variant: sum(values) / len(values) for variant, values in groups.items() if values
    }

    def rewrite(owner, key, tv):
        if owner is None or owner.variant not in means:
            return tv
        mean = means[owner.variant]
        if tv.kind == "integer":
            return TypedValue.integer(math.floor(mean + Fraction(1, 2)))
        return TypedValue.real(float(mean))

    out = _rewrite_occurrences(log, [attribute], rewrite, include_log_attrs=False)
    params = {"attribute": attribute, "grouping": grouping}
    return attach_operation_record(out, "condensation", "attribute", {attribute}, params, applied_at)


# ---------------------------------------------------------------------------
# swapping

def swap(
    log: EventLog,
    attribute: str,
    scope: str = "global",
    seed: int = 0,
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Permute the attribute's values uniformly at random within each scope."""
    if scope not in ("within-variant", "global"):
        raise ModelInvariantError(f"unknown swap scope: {scope!r}")
    _require_keys(log, [attribute])
    if attribute == TIMESTAMP_KEY:
        raise ModelInvariantError("time:timestamp cannot be swapped without breaking trace order")

    def group_key(trace):
        return ("global",) if scope == "global" else ("variant",) + trace.variant

    ordered = defaultdict(list)
    for trace in log.traces:
        gkey = group_key(trace)
        if attribute in trace.attributes:
            ordered[gkey].append(trace.attributes[attribute])
        for event in trace.events:
            if attribute in event.payload:
                ordered[gkey].append(event.payload[attribute])

    shuffled = {}
    for gkey, values in ordered.items():
        rng = random.Random(derived_seed(seed, attribute, *gkey))
        values = list(values)
        rng.shuffle(values)
        shuffled[gkey] = deque(values)

    def rewrite(owner, key, tv):
        return shuffled[group_key(owner)].popleft()

    out = _rewrite_occurrences(log, [attribute], rewrite, include_log_attrs=False)
    params = {"attribute": attribute, "scope": scope}
    return attach_operation_record(out, "swapping", "attribute", {attribute}, params, applied_at)


# ---------------------------------------------------------------------------
# generalization

_GRANULARITIES = ("year", "month", "day", "hour", "minute")


def _truncate_to(dt: datetime, granularity: str) -> datetime:
    fields = {"second": 0, "microsecond": 0}
    if granularity in ("year", "month", "day", "hour"):
        fields["minute"] = 0
    if granularity in ("year", "month", "day"):
        fields["hour"] = 0
    if granularity in ("year", "month"):
        fields["day"] = 1
    if granularity == "year":
        fields["month"] = 1
    return dt.replace(**fields)


def generalize(
    log: EventLog,
    attribute: str,
    scheme: Union[Taxonomy, str],
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Coarsen values: one taxonomy level up, or truncate timestamps."""
    _require_keys(log, [attribute])
    if isinstance(scheme, Taxonomy):
        def rewrite(owner, key, tv):
            if tv.kind not in ("string", "id"):
                raise SelectorTypeError(
                    f"taxonomy generalization needs string values; {key!r} has kind {tv.kind}"
                )
            parent = scheme.parent_of(tv.value)
            return tv if parent is None else TypedValue(tv.kind, parent)

        params = {
            "attribute": attribute,
            "scheme": "taxonomy",
            "edges": sorted(scheme.parents.items()),
        }
    else:
        if scheme not in _GRANULARITIES:
            raise ModelInvariantError(f"unknown timestamp granularity: {scheme!r}")

        def rewrite(owner, key, tv):
            if tv.kind != "datetime":
                raise SelectorTypeError(
                    f"timestamp generalization needs datetime values; {key!r} has kind {tv.kind}"
                )
            return TypedValue.timestamp(_truncate_to(tv.value, scheme))

        params = {"attribute": attribute, "scheme": "timestamp", "granularity": scheme}
    out = _rewrite_occurrences(log, [attribute], rewrite)
    return attach_operation_record(
        out, "generalization", "attribute", {attribute}, params, applied_at
    )


# ---------------------------------------------------------------------------
# cryptography

def _canonical_plaintext(tv: TypedValue) -> bytes:
    return f"{tv.kind}:{tv.text()}".encode("utf-8")


def _value_from_plaintext(blob: bytes) -> TypedValue:
    try:
        kind, _, text = blob.decode("utf-8").partition(":")
    except UnicodeDecodeError as exc:
        raise DecryptionFailure("recovered plaintext is not valid UTF-8") from exc
    if kind not in KINDS:
        raise DecryptionFailure(f"recovered value has unknown kind {kind!r}")
    try:
        if kind == "integer":
            return TypedValue.integer(int(text))
        if kind == "real":
            return TypedValue.real(float(text))
        if kind == "boolean":
            return TypedValue.boolean(text == "true")
        if kind == "datetime":
            return TypedValue.timestamp(parse_timestamp(text))
    except ValueError as exc:
        raise DecryptionFailure(f"recovered {kind} value is malformed: {text!r}") from exc
    return TypedValue(kind, text)


def _siv(key: KeySpec) -> AESSIV:
    return AESSIV(hashlib.sha512(key.secret).digest())


def pseudonymize(
    log: EventLog,
    attributes: Iterable,
    key: KeySpec,
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Replace values of the attributes by keyed tokens.

    Deterministic mode emits 16-hex-char MAC tokens (equal values, equal
    tokens); recoverable mode emits deterministic authenticated ciphertexts
    that de_pseudonymize can invert under the same key.
    """
    keys = frozenset(attributes)
    if not keys:
        raise ModelInvariantError("attributes must name at least one key")
    _require_keys(log, keys)
    if TIMESTAMP_KEY in keys:
        raise ModelInvariantError(
            "time:timestamp cannot be pseudonymized; generalize it instead"
        )

    if key.mode == "pseudonymize-deterministic":
        seen = {}

        def rewrite(owner, attr, tv):
            plain = _canonical_plaintext(tv)
            token = hmac.new(key.secret, plain, hashlib.sha256).hexdigest()[:16]
            prior = seen.setdefault((attr, token), plain)
            if prior != plain:
                raise PseudonymCollision(
                    f"attribute {attr!r}: values {prior!r} and {plain!r} "
                    f"collide on token {token} under key {key.key_id!r}"
                )
            return TypedValue.string(token)

    else:
        siv = _siv(key)

        def rewrite(owner, attr, tv):
            token = base64.b64encode(siv.encrypt(_canonical_plaintext(tv), None)).decode("ascii")
            return TypedValue.string(token)

    out = _rewrite_occurrences(log, sorted(keys), rewrite)
    params = {"key_id": key.key_id, "mode": key.mode, "attributes": sorted(keys)}
    return attach_operation_record(out, "cryptography", "attribute", keys, params, applied_at)


def de_pseudonymize(
    log: EventLog,
    key: KeySpec,
    *,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Invert the most recent recoverable pseudonymization under `key`."""
    if key.mode != "encrypt-recoverable":
        raise DecryptionFailure("de-pseudonymization needs an encrypt-recoverable key")
    crypto_records = [
        r for r in log.privacy_metadata.records if r.operation_kind == "cryptography"
    ]
    if not crypto_records:
        raise DecryptionFailure("the log carries no cryptography records to invert")
    targets = crypto_records[-1].target_attributes
    siv = _siv(key)

    def rewrite(owner, attr, tv):
        if tv.kind != "string":
            raise DecryptionFailure(
                f"attribute {attr!r} holds a {tv.kind} value, not a ciphertext token"
            )
        try:
            blob = siv.decrypt(base64.b64decode(tv.value, validate=True), None)
        except (binascii.Error, ValueError, InvalidTag, InvalidSignature) as exc:
            raise DecryptionFailure(
                f"attribute {attr!r}: token does not decrypt under key {key.key_id!r}"
            ) from exc
        return _value_from_plaintext(blob)

    out = _rewrite_occurrences(log, sorted(targets), rewrite)
    params = {"key_id": key.key_id, "mode": "decrypt", "attributes": sorted(targets)}
    return attach_operation_record(out, "cryptography", "attribute", targets, params, applied_at)
