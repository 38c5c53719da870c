"""Differentially private event-log publication.

The variant histogram is perturbed with Laplace noise of scale 1/epsilon
(sensitivity 1: one trace moves one variant count by one), implausible
variants are pruned, and a concrete log is rebuilt from the noisy histogram
with timestamps resampled from the original log's observed delays.

Only variants observed in the input can appear in the output; the mechanism
does not enumerate the unobserved variant universe.  That keeps publication
practical but weakens the formal guarantee at the domain boundary — callers
should know this trade-off.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Mapping, Optional

from .errors import InvalidEpsilon, ModelInvariantError, UnknownVariantSymbol
from .model import Event, EventLog, Trace, attach_operation_record
from .stats import TimingPools, variants
from .util import derived_seed, parallel_map


@dataclass(frozen=True)
class DpParams:
    epsilon: float
    prune_threshold: float = 0.0
    max_variant_length: int = 1000
    seed: int = 0
    secure_random: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidEpsilon(f"epsilon must be positive, got {self.epsilon!r}")
        if self.prune_threshold < 0:
            raise ModelInvariantError("prune_threshold must be non-negative")
        if self.max_variant_length < 1:
            raise ModelInvariantError("max_variant_length must be positive")


def laplace_sample(rng: random.Random, scale: float) -> float:
    """One draw from Laplace(0, scale) via the inverse CDF."""
    while True:
        u = rng.random() - 0.5
        if u > -0.5:
            break
    return -scale * math.copysign(1.0, u) * math.log1p(-2.0 * abs(u))


def _round_half_away(x: float) -> int:
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


def _variant_rng(params: DpParams, variant: tuple) -> random.Random:
    if params.secure_random:
        return random.SystemRandom()
    return random.Random(derived_seed(params.seed, "variant-noise", *variant))


def dp_variant_counts(counts: Mapping, params: DpParams) -> dict:
    """Noisy variant histogram: add Laplace(1/epsilon), round, prune.

    A variant survives only when its rounded noisy count reaches
    max(1, ceil(prune_threshold)); longer variants than max_variant_length are
    dropped outright.  Noise streams are derived per variant, so the result is
    independent of iteration order and worker choice.
    """
    floor = max(1, math.ceil(params.prune_threshold))
    out = {}
    for variant in sorted(counts):
        if len(variant) > params.max_variant_length:
            continue
        rng = _variant_rng(params, variant)
        noisy = counts[variant] + laplace_sample(rng, 1.0 / params.epsilon)
        value = max(0, _round_half_away(noisy))
        if value >= floor:
            out[variant] = value
    return out


def reconstruct_log(
    original: EventLog,
    noisy: Mapping,
    seed: int = 0,
    *,
    workers: int = 1,
) -> EventLog:
    """Materialize a log whose variant histogram equals `noisy`.

    Inter-event delays are drawn uniformly from the original log's observed
    delays for the same activity pair (falling back to the global median when
    a pair was never observed); start times are drawn from observed starts.
    """
    alphabet = original.alphabet()
    for variant in noisy:
        for activity in variant:
            if activity not in alphabet:
                raise UnknownVariantSymbol(
                    f"variant activity {activity!r} does not occur in the original log"
                )
    pools = TimingPools(original)

    specs = []
    counter = 1
    for variant in sorted(noisy):
        for _ in range(noisy[variant]):
            specs.append((f"case-{counter}", variant))
            counter += 1

    def build(spec):
        case_id, variant = spec
        rng = random.Random(derived_seed(seed, "reconstruct", case_id, *variant))
        events = []
        ts = pools.sample_start(rng)
        prev = None
        for activity in variant:
            if prev is not None:
                ts = ts + timedelta(
                    milliseconds=pools.sample_delay_ms(rng, (prev, activity))
                )
            events.append(Event(activity=activity, timestamp=ts))
            prev = activity
        return Trace(case_id=case_id, events=tuple(events))

    traces = parallel_map(build, specs, workers)
    return EventLog.create(traces, privacy_metadata=original.privacy_metadata)


def dp_publish(
    log: EventLog,
    params: DpParams,
    *,
    workers: int = 1,
    applied_at: Optional[datetime] = None,
) -> EventLog:
    """Publish an epsilon-DP version of the log.

    The closest declared operation kind is "addition": the mechanism both adds
    and removes population, and no dedicated "noise" kind exists.
    """
    counts = variants(log, workers=workers)
    noisy = dp_variant_counts(counts, params)
    out = reconstruct_log(log, noisy, params.seed, workers=workers)
    record_params = {
        "epsilon": params.epsilon,
        "prune_threshold": params.prune_threshold,
        "max_variant_length": params.max_variant_length,
        "seed": params.seed,
    }
    return attach_operation_record(out, "addition", "log", (), record_params, applied_at)
