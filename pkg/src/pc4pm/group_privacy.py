"""Group-based privacy enforcement in the TLKC style.

An adversary knows up to L activities of a target case (as a set, a multiset,
or an ordered subsequence).  A log satisfies the guarantee when every such
knowledge instance either matches nobody or matches a group of at least K
cases, and no group leaks a sensitive value with confidence above C.
Enforcement first coarsens timestamps to granularity T, then greedily
suppresses whole activities until no violation remains.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from itertools import combinations
from typing import Optional

from .errors import EmptyResult, ModelInvariantError
from .model import ACTIVITY_KEY, TIMESTAMP_KEY, EventLog, Trace, TypedValue
from .ops import _GRANULARITIES, Atom, Selector, generalize, suppress
from .util import parallel_map

KNOWLEDGE_KINDS = ("set", "multiset", "subsequence")


@dataclass(frozen=True)
class BackgroundKnowledge:
    """What an adversary may know about one case: up to L of its activities."""

    kind: str
    items: tuple

    def __post_init__(self):
        if self.kind not in KNOWLEDGE_KINDS:
            raise ModelInvariantError(f"unknown knowledge kind: {self.kind!r}")
        items = tuple(self.items)
        if not items:
            raise ModelInvariantError("background knowledge needs at least one item")
        if self.kind == "set":
            items = tuple(sorted(set(items)))
        elif self.kind == "multiset":
            items = tuple(sorted(items))
        object.__setattr__(self, "items", items)

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class TlkcParams:
    """T = timestamp granularity, L = knowledge size bound, K = group floor,
    C = confidence ceiling; sensitive_attribute is a trace-level key."""

    t: str = "none"
    l: int = 1
    k: int = 1
    c: float = 1.0
    sensitive_attribute: Optional[str] = None

    def __post_init__(self):
        if self.t != "none" and self.t not in _GRANULARITIES:
            raise ModelInvariantError(f"unknown granularity: {self.t!r}")
        if self.l < 1:
            raise ModelInvariantError("L must be at least 1")
        if self.k < 1:
            raise ModelInvariantError("K must be at least 1")
        if not 0 < self.c <= 1:
            raise ModelInvariantError("C must lie in (0, 1]")


def _embeds(needle, haystack) -> bool:
    """True when needle is an order-preserving subsequence of haystack."""
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def knowledge_matches(knowledge: BackgroundKnowledge, trace: Trace) -> bool:
    acts = trace.variant
    if knowledge.kind == "set":
        return set(knowledge.items) <= set(acts)
    if knowledge.kind == "multiset":
        have = Counter(acts)
        return all(have[a] >= n for a, n in Counter(knowledge.items).items())
    return _embeds(knowledge.items, acts)


def matching_cases(log: EventLog, knowledge: BackgroundKnowledge, workers: int = 1) -> set:
    """Case ids of all traces the knowledge is consistent with."""
    flags = parallel_map(lambda t: knowledge_matches(knowledge, t), log.traces, workers)
    return {t.case_id for t, hit in zip(log.traces, flags) if hit}


def derivable_knowledge(trace: Trace, kind: str, max_size: int) -> set:
    """Every knowledge instance of size <= max_size an adversary could draw
    from this trace alone (the prosecutor model's candidate set)."""
    acts = trace.variant
    out = set()
    if kind == "set":
        base = sorted(set(acts))
        for size in range(1, min(max_size, len(base)) + 1):
            for combo in combinations(base, size):
                out.add(BackgroundKnowledge("set", combo))
    elif kind == "multiset":
        base = sorted(acts)
        for size in range(1, min(max_size, len(base)) + 1):
            for combo in combinations(base, size):
                out.add(BackgroundKnowledge("multiset", combo))
    else:
        for size in range(1, min(max_size, len(acts)) + 1):
            for positions in combinations(range(len(acts)), size):
                out.add(
                    BackgroundKnowledge("subsequence", tuple(acts[i] for i in positions))
                )
    return out


def _candidates(log: EventLog, params: TlkcParams, kind: str) -> set:
    """Every knowledge instance of size <= L that occurs in some trace."""
    out = set()
    for trace in log.traces:
        out |= derivable_knowledge(trace, kind, params.l)
    return out


def _violates(log, by_case, knowledge, params) -> bool:
    group = {t.case_id for t in log.traces if knowledge_matches(knowledge, t)}
    if 0 < len(group) < params.k:
        return True
    if params.sensitive_attribute is not None and group:
        values = Counter()
        for cid in group:
            tv = by_case[cid].attributes.get(params.sensitive_attribute)
            if tv is not None:
                values[(tv.kind, tv.text())] += 1
        if values and max(values.values()) / len(group) > params.c:
            return True
    return False


def find_violations(log: EventLog, params: TlkcParams, kind: str, workers: int = 1) -> set:
    """All occurring knowledge instances whose matching group breaks K or C."""
    if kind not in KNOWLEDGE_KINDS:
        raise ModelInvariantError(f"unknown knowledge kind: {kind!r}")
    candidates = sorted(_candidates(log, params, kind), key=lambda kn: kn.items)
    by_case = {t.case_id: t for t in log.traces}
    flags = parallel_map(
        lambda kn: _violates(log, by_case, kn, params), candidates, workers
    )
    return {kn for kn, bad in zip(candidates, flags) if bad}


def enforce(
    log: EventLog,
    params: TlkcParams,
    kind: str,
    seed: int = 0,
    *,
    workers: int = 1,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Make the log satisfy the guarantee by generalization plus suppression.

    Each round removes every instance of the single activity whose removal
    eliminates the most outstanding violations (ties broken lexicographically),
    so the loop terminates: the set of occurring activities strictly shrinks.
    The seed is accepted for interface stability; the lexicographic rule makes
    the current strategy fully deterministic.
    """
    if kind not in KNOWLEDGE_KINDS:
        raise ModelInvariantError(f"unknown knowledge kind: {kind!r}")
    out = log
    if params.t != "none":
        out = generalize(out, TIMESTAMP_KEY, params.t, applied_at=applied_at)
    while True:
        violations = find_violations(out, params, kind, workers=workers)
        if not violations:
            return out
        best_activity, best_gain = None, 0
        for activity in sorted(out.alphabet()):
            gain = sum(1 for v in violations if activity in v.items)
            if gain > best_gain:
                best_activity, best_gain = activity, gain
        # every violation is built from occurring activities, so one must gain
        assert best_activity is not None
        selector = Selector(
            "event", (Atom(ACTIVITY_KEY, "=", TypedValue.string(best_activity)),)
        )
        out = suppress(out, selector, "whole-match", applied_at=applied_at)
        if out.event_count == 0:
            raise EmptyResult(
                "enforcement suppressed every event; relax K, C, or L and retry"
            )
