"""Basic log statistics: trace variants, the directly-follows graph, timing pools."""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict

from .model import DirectlyFollowsGraph, EventLog
from .util import EPOCH, parallel_map


def variants(log: EventLog, workers: int = 1) -> dict:
    """Count traces per activity sequence. Counts sum to the number of traces."""
    counts = Counter()
    for v in parallel_map(lambda t: t.variant, log.traces, workers):
        counts[v] += 1
    return dict(counts)


def _trace_df(trace):
    acts = trace.variant
    pairs = Counter(zip(acts, acts[1:]))
    return pairs, acts[0] if acts else None, acts[-1] if acts else None


def df_graph(log: EventLog, workers: int = 1) -> DirectlyFollowsGraph:
    """Count adjacent in-trace activity pairs plus per-trace start/end activities."""
    pair_counts = Counter()
    start_counts = Counter()
    end_counts = Counter()
    for pairs, start, end in parallel_map(_trace_df, log.traces, workers):
        pair_counts.update(pairs)
        if start is not None:
            start_counts[start] += 1
            end_counts[end] += 1
    return DirectlyFollowsGraph(
        pair_counts=dict(pair_counts),
        start_counts=dict(start_counts),
        end_counts=dict(end_counts),
    )


class TimingPools:
    """Observed timing material for synthesizing realistic trace timestamps.

    `delays[(a, b)]` holds every observed inter-event delay (in ms) for the
    adjacent pair a→b; `fallback_ms` is the median over all observed delays
    (0 when the log has no adjacent events); `starts` are the first-event
    timestamps of non-empty traces, sorted.
    """

    def __init__(self, log: EventLog):
        delays = defaultdict(list)
        all_ms = []
        starts = []
        for trace in log.traces:
            if trace.events:
                starts.append(trace.events[0].timestamp)
            for prev, cur in zip(trace.events, trace.events[1:]):
                ms = int((cur.timestamp - prev.timestamp).total_seconds() * 1000)
                delays[(prev.activity, cur.activity)].append(ms)
                all_ms.append(ms)
        self.delays = {pair: sorted(pool) for pair, pool in delays.items()}
        self.fallback_ms = int(statistics.median(all_ms)) if all_ms else 0
        self.starts = sorted(starts)

    def sample_delay_ms(self, rng, pair) -> int:
        pool = self.delays.get(pair)
        if pool:
            return pool[rng.randrange(len(pool))]
        return self.fallback_ms

    def sample_start(self, rng):
        if not self.starts:
            return EPOCH
        return self.starts[rng.randrange(len(self.starts))]
