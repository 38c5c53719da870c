"""Disclosure-risk and data-utility quantification.

Risk follows the prosecutor model: the adversary's knowledge about a case is
drawn from that case's own trace, so each case's exposure is the smallest
matching group over all knowledge instances it could have leaked.  Utility
compares an anonymized log against its original on variants, directly-follows
behaviour, and event volume.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import fmean
from typing import Mapping

from .errors import ModelInvariantError
from .group_privacy import (
    KNOWLEDGE_KINDS,
    derivable_knowledge,
    knowledge_matches,
)
from .model import EventLog
from .stats import df_graph, variants
from .util import parallel_map


@dataclass(frozen=True)
class RiskReport:
    knowledge_kind: str
    l: int
    uniqueness_rate: float
    avg_reid_probability: float
    per_case_min_group: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "per_case_min_group", dict(self.per_case_min_group))
        if not 0 <= self.uniqueness_rate <= 1:
            raise ModelInvariantError("uniqueness_rate must lie in [0, 1]")
        if not 0 <= self.avg_reid_probability <= 1:
            raise ModelInvariantError("avg_reid_probability must lie in [0, 1]")

    def as_dict(self) -> dict:
        return {
            "knowledge_kind": self.knowledge_kind,
            "l": self.l,
            "uniqueness_rate": self.uniqueness_rate,
            "avg_reid_probability": self.avg_reid_probability,
            "per_case_min_group": dict(sorted(self.per_case_min_group.items())),
        }


@dataclass(frozen=True)
class UtilityReport:
    variant_preservation: float
    df_distance: float
    event_count_ratio: float

    def __post_init__(self):
        if not 0 <= self.variant_preservation <= 1:
            raise ModelInvariantError("variant_preservation must lie in [0, 1]")
        if not 0 <= self.df_distance <= 1:
            raise ModelInvariantError("df_distance must lie in [0, 1]")
        if self.event_count_ratio < 0:
            raise ModelInvariantError("event_count_ratio must be non-negative")

    def as_dict(self) -> dict:
        return {
            "variant_preservation": self.variant_preservation,
            "df_distance": self.df_distance,
            "event_count_ratio": self.event_count_ratio,
        }


def disclosure_risk(log: EventLog, kind: str, l: int, workers: int = 1) -> RiskReport:
    """Per-case minimum matching-group sizes under knowledge of size <= l.

    A case with an empty trace leaks nothing, so it hides in the whole
    population (min group = number of traces).
    """
    if kind not in KNOWLEDGE_KINDS:
        raise ModelInvariantError(f"unknown knowledge kind: {kind!r}")
    if l < 1:
        raise ModelInvariantError("L must be at least 1")
    n = len(log.traces)
    per_trace = parallel_map(
        lambda t: derivable_knowledge(t, kind, l), log.traces, workers
    )
    universe = sorted(set().union(*per_trace), key=lambda kn: kn.items) if per_trace else []
    sizes = parallel_map(
        lambda kn: sum(1 for t in log.traces if knowledge_matches(kn, t)),
        universe,
        workers,
    )
    group_size = dict(zip(universe, sizes))
    per_case = {
        trace.case_id: min((group_size[kn] for kn in knowledge), default=n)
        for trace, knowledge in zip(log.traces, per_trace)
    }
    uniqueness = sum(1 for g in per_case.values() if g == 1) / n if n else 0.0
    avg_reid = fmean(1 / g for g in per_case.values()) if per_case else 0.0
    return RiskReport(
        knowledge_kind=kind,
        l=l,
        uniqueness_rate=uniqueness,
        avg_reid_probability=avg_reid,
        per_case_min_group=per_case,
    )


def _normalized(pair_counts: Mapping) -> dict:
    total = sum(pair_counts.values())
    return {pair: count / total for pair, count in pair_counts.items()}


def data_utility(original: EventLog, anonymized: EventLog, workers: int = 1) -> UtilityReport:
    """Compare an anonymized log against its original.

    variant_preservation: share of the original's distinct variants that
    survive; df_distance: half the L1 distance between relative
    directly-follows frequencies; event_count_ratio: event volume kept.
    An empty original yields (1, 0, 1) by convention.
    """
    if not original.traces:
        return UtilityReport(1.0, 0.0, 1.0)
    original_variants = set(variants(original, workers=workers))
    anonymized_variants = set(variants(anonymized, workers=workers))
    preservation = len(original_variants & anonymized_variants) / len(original_variants)

    original_pairs = df_graph(original, workers=workers).pair_counts
    anonymized_pairs = df_graph(anonymized, workers=workers).pair_counts
    if not original_pairs and not anonymized_pairs:
        distance = 0.0
    elif not original_pairs or not anonymized_pairs:
        distance = 1.0
    else:
        p, q = _normalized(original_pairs), _normalized(anonymized_pairs)
        distance = 0.5 * sum(
            abs(p.get(pair, 0.0) - q.get(pair, 0.0)) for pair in p.keys() | q.keys()
        )

    source_events = original.event_count
    kept_events = anonymized.event_count
    if source_events:
        ratio = kept_events / source_events
    else:
        ratio = 1.0 if kept_events == 0 else float(kept_events)
    return UtilityReport(
        variant_preservation=preservation,
        df_distance=distance,
        event_count_ratio=ratio,
    )


def render_risk(report: RiskReport) -> str:
    lines = [
        f"knowledge kind:          {report.knowledge_kind}",
        f"knowledge size bound L:  {report.l}",
        f"uniqueness rate:         {report.uniqueness_rate:.6f}",
        f"avg re-id probability:   {report.avg_reid_probability:.6f}",
        "per-case minimum group sizes:",
    ]
    for case_id, group in sorted(report.per_case_min_group.items()):
        lines.append(f"  {case_id}: {group}")
    return "\n".join(lines) + "\n"


def render_utility(report: UtilityReport) -> str:
    return (
        f"variant preservation:  {report.variant_preservation:.6f}\n"
        f"df distance:           {report.df_distance:.6f}\n"
        f"event count ratio:     {report.event_count_ratio:.6f}\n"
    )
