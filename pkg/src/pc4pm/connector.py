"""Encrypted directly-follows abstraction.

A log is reduced to independent aggregate rows (source, target, count) whose
activity labels are deterministic pseudonyms under a shared key, so the
artifact supports DFG discovery without exposing labels, cases, timestamps or
trace structure.  Virtual start/end rows use the reserved plaintext markers
"▷" and "□".  Decoding is a dictionary attack the legitimate key holder runs
with the known activity alphabet.
"""

from __future__ import annotations

import hashlib
import hmac
from datetime import datetime
from typing import Iterable, Optional

from .errors import (
    MalformedAbstraction,
    ModelInvariantError,
    PseudonymCollision,
    ReservedSymbolClash,
    UnresolvedToken,
)
from .model import (
    ACTIVITY_KEY,
    AbstractionHeader,
    DirectlyFollowsGraph,
    EventLog,
    EventLogAbstraction,
    PrivacyMetadata,
    TypedValue,
)
from .ops import KeySpec
from .stats import df_graph
from .util import EPOCH, digest

START_MARKER = "▷"
END_MARKER = "□"

ABSTRACTION_KIND = "connector-dfg"

COLUMNS = ("enc_source", "enc_target", "count", "flags")


def _token(key: KeySpec, label: str) -> str:
    # uppercase so that tokens share no substring with lowercase label alphabets
    return hmac.new(key.secret, label.encode("utf-8"), hashlib.sha256).hexdigest()[:16].upper()


def _require_deterministic(key: KeySpec):
    if key.mode != "pseudonymize-deterministic":
        raise ModelInvariantError("the connector needs a pseudonymize-deterministic key")


def encode(
    log: EventLog,
    key: KeySpec,
    *,
    applied_at: Optional[datetime] = None,
) -> EventLogAbstraction:
    """Encrypt the log's DFG into independent aggregate rows.

    The result is a pure function of df_graph(log) and the key: logs with the
    same directly-follows behaviour produce byte-identical abstractions, so
    nothing about individual traces survives.  applied_at therefore defaults
    to the epoch, not to anything derived from the log.
    """
    _require_deterministic(key)
    alphabet = log.alphabet()
    for marker in (START_MARKER, END_MARKER):
        if marker in alphabet:
            raise ReservedSymbolClash(f"activity label {marker!r} is reserved")

    dfg = df_graph(log)
    rows = []
    for (source, target), count in dfg.pair_counts.items():
        rows.append((_token(key, source), _token(key, target), count, ""))
    for activity, count in dfg.start_counts.items():
        rows.append((START_MARKER, _token(key, activity), count, "source-is-start"))
    for activity, count in dfg.end_counts.items():
        rows.append((_token(key, activity), END_MARKER, count, "target-is-end"))
    rows.sort(key=lambda r: (r[3], r[0], r[1]))

    metadata = PrivacyMetadata().append(
        operation_kind="cryptography",
        level="log",
        target_attributes={ACTIVITY_KEY},
        parameter_digest=digest({"key_id": key.key_id, "technique": ABSTRACTION_KIND}),
        applied_at=applied_at if applied_at is not None else EPOCH,
    )
    header = AbstractionHeader(
        abstraction_kind=ABSTRACTION_KIND,
        origin_log_id="",
        technique=ABSTRACTION_KIND,
        privacy_metadata=metadata,
    )
    return EventLogAbstraction(
        header=header,
        columns=COLUMNS,
        rows=[
            (
                TypedValue.string(src),
                TypedValue.string(tgt),
                TypedValue.integer(count),
                TypedValue.string(flags),
            )
            for src, tgt, count, flags in rows
        ],
    )


def decode(
    ela: EventLogAbstraction,
    key: KeySpec,
    dictionary: Iterable,
) -> DirectlyFollowsGraph:
    """Recover the labeled DFG from an encoded abstraction.

    `dictionary` must cover every encoded activity label; tokens that match no
    candidate raise UnresolvedToken.
    """
    _require_deterministic(key)
    if ela.header.abstraction_kind != ABSTRACTION_KIND:
        raise MalformedAbstraction(
            f"expected a {ABSTRACTION_KIND} abstraction, got {ela.header.abstraction_kind!r}"
        )
    if tuple(ela.columns) != COLUMNS:
        raise MalformedAbstraction(f"unexpected columns: {list(ela.columns)}")

    candidates = {}
    for label in dictionary:
        candidates.setdefault(_token(key, label), set()).add(label)

    def resolve(token: str) -> str:
        labels = candidates.get(token)
        if not labels:
            raise UnresolvedToken(f"token {token} matches no dictionary label")
        if len(labels) > 1:
            raise PseudonymCollision(
                f"token {token} is ambiguous between {sorted(labels)}"
            )
        return next(iter(labels))

    pair_counts, start_counts, end_counts = {}, {}, {}
    for row in ela.rows:
        cells = dict(zip(ela.columns, row))
        source = cells["enc_source"].value
        target = cells["enc_target"].value
        count = cells["count"].value
        if source == START_MARKER:
            start_counts[resolve(target)] = count
        elif target == END_MARKER:
            end_counts[resolve(source)] = count
        else:
            pair_counts[(resolve(source), resolve(target))] = count
    return DirectlyFollowsGraph(
        pair_counts=pair_counts, start_counts=start_counts, end_counts=end_counts
    )
