"""Privacy-aware organizational role mining.

Roles are found by complete-linkage agglomerative clustering of resources over
the *support* of their activity profiles (which activities they perform at
all, not how often).  Before the resource-activity matrix leaves the trusted
side, its nonzero frequencies are perturbed with bounded uniform noise.
Because clustering only looks at supports and the perturbation never touches a
cell's zero/nonzero status, the discovered roles are provably identical with
and without noise — the noise defeats frequency-based attacks for free.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from datetime import datetime
from typing import Optional, Sequence

import numpy as np

from .errors import ModelInvariantError, NoResources
from .model import (
    RESOURCE_KEY,
    AbstractionHeader,
    EventLog,
    EventLogAbstraction,
    TypedValue,
    default_applied_at,
)
from .util import derived_seed, digest, parallel_map

MATRIX_KIND = "resource-activity-matrix"
ROLESET_KIND = "role-set"


@dataclass(frozen=True, eq=False)
class ResourceActivityMatrix:
    """counts[i][j] = how often resource i performed activity j."""

    resources: Sequence[str]
    activities: Sequence[str]
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "activities", tuple(self.activities))
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.shape != (len(self.resources), len(self.activities)):
            raise ModelInvariantError(
                f"counts shape {counts.shape} does not fit "
                f"{len(self.resources)} resources x {len(self.activities)} activities"
            )
        if (counts < 0).any():
            raise ModelInvariantError("counts must be non-negative")
        if len(self.resources) and (counts.sum(axis=1) == 0).any():
            raise ModelInvariantError("every listed resource needs at least one event")

    def __eq__(self, other):
        return (
            isinstance(other, ResourceActivityMatrix)
            and self.resources == other.resources
            and self.activities == other.activities
            and np.array_equal(self.counts, other.counts)
        )

    def support(self, resource: str) -> frozenset:
        """The set of activities the resource performs at least once."""
        i = self.resources.index(resource)
        return frozenset(
            a for a, c in zip(self.activities, self.counts[i]) if c > 0
        )


@dataclass(frozen=True)
class Role:
    role_id: str
    members: tuple
    profile: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "profile", frozenset(self.profile))
        if not self.members:
            raise ModelInvariantError("a role needs at least one member")
        if not self.profile:
            raise ModelInvariantError("a role profile must be non-empty")


@dataclass(frozen=True)
class RoleSet:
    roles: tuple

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(self.roles))
        seen = set()
        for role in self.roles:
            for member in role.members:
                if member in seen:
                    raise ModelInvariantError(f"resource {member!r} is in two roles")
                seen.add(member)


def build_matrix(log: EventLog, workers: int = 1) -> ResourceActivityMatrix:
    """Count activity executions per resource; events without resource are skipped."""
    partials = parallel_map(
        lambda t: Counter(
            (e.resource, e.activity) for e in t.events if e.resource is not None
        ),
        log.traces,
        workers,
    )
    totals = Counter()
    for part in partials:
        totals.update(part)
    if not totals:
        raise NoResources("no event in the log carries org:resource")
    resources = sorted({r for r, _ in totals})
    activities = sorted({a for _, a in totals})
    counts = np.zeros((len(resources), len(activities)), dtype=np.int64)
    for (resource, activity), n in totals.items():
        counts[resources.index(resource), activities.index(activity)] = n
    return ResourceActivityMatrix(resources, activities, counts)


def perturb_matrix(
    m: ResourceActivityMatrix, noise_bound: int, seed: int = 0
) -> ResourceActivityMatrix:
    """Add uniform integer noise from [-noise_bound, +noise_bound] to nonzero cells.

    Perturbed cells are clamped at 1 and zero cells stay zero, so the support
    of every resource profile is exactly preserved.
    """
    if noise_bound < 1:
        raise ModelInvariantError("noise_bound must be at least 1")
    counts = m.counts.copy()
    for i, resource in enumerate(m.resources):
        for j, activity in enumerate(m.activities):
            if counts[i, j] > 0:
                rng = random.Random(derived_seed(seed, "perturb", resource, activity))
                counts[i, j] = max(1, counts[i, j] + rng.randint(-noise_bound, noise_bound))
    return ResourceActivityMatrix(m.resources, m.activities, counts)


def _jaccard(a: frozenset, b: frozenset) -> float:
    return len(a & b) / len(a | b)


def mine_roles(m: ResourceActivityMatrix, threshold: float) -> RoleSet:
    """Complete-linkage agglomerative clustering over binary activity supports.

    Cluster similarity is the minimum pairwise Jaccard similarity between
    member supports; clusters merge while the best similarity is >= threshold.
    Ties pick the lexicographically smallest pair of clusters.
    """
    if not 0 <= threshold <= 1:
        raise ModelInvariantError("threshold must lie in [0, 1]")
    supports = {r: m.support(r) for r in m.resources}
    clusters = [(r,) for r in sorted(m.resources)]

    def linkage(c1, c2):
        return min(_jaccard(supports[a], supports[b]) for a in c1 for b in c2)

    while len(clusters) > 1:
        best = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                sim = linkage(clusters[i], clusters[j])
                if sim < threshold:
                    continue
                cand = (-sim, clusters[i], clusters[j])
                if best is None or cand < best:
                    best = cand
        if best is None:
            break
        _, left, right = best
        clusters.remove(left)
        clusters.remove(right)
        clusters.append(tuple(sorted(left + right)))
        clusters.sort()

    roles = []
    for n, members in enumerate(sorted(clusters), start=1):
        profile = frozenset().union(*(supports[r] for r in members))
        roles.append(Role(role_id=f"role-{n}", members=members, profile=profile))
    return RoleSet(tuple(roles))


def matrix_abstraction(
    m: ResourceActivityMatrix,
    metadata,
    origin_log_id: str = "",
) -> EventLogAbstraction:
    header = AbstractionHeader(
        abstraction_kind=MATRIX_KIND,
        origin_log_id=origin_log_id,
        technique="role-miner",
        privacy_metadata=metadata,
    )
    rows = []
    for i, resource in enumerate(m.resources):
        row = [TypedValue.string(resource)]
        row.extend(TypedValue.integer(int(c)) for c in m.counts[i])
        rows.append(tuple(row))
    return EventLogAbstraction(
        header=header, columns=("resource",) + m.activities, rows=rows
    )


def roleset_abstraction(
    role_set: RoleSet,
    metadata,
    origin_log_id: str = "",
) -> EventLogAbstraction:
    header = AbstractionHeader(
        abstraction_kind=ROLESET_KIND,
        origin_log_id=origin_log_id,
        technique="role-miner",
        privacy_metadata=metadata,
    )
    rows = [
        (
            TypedValue.string(role.role_id),
            TypedValue.string("|".join(role.members)),
            TypedValue.string("|".join(sorted(role.profile))),
        )
        for role in role_set.roles
    ]
    return EventLogAbstraction(
        header=header, columns=("role_id", "members", "profile"), rows=rows
    )


def render_roles(role_set: RoleSet) -> str:
    """Human-readable role report."""
    lines = []
    for role in role_set.roles:
        members = ", ".join(role.members)
        profile = ", ".join(sorted(role.profile))
        lines.append(f"{role.role_id}: members [{members}] perform [{profile}]")
    return "\n".join(lines) + ("\n" if lines else "")


def privacy_aware_roles(
    log: EventLog,
    noise_bound: int,
    threshold: float,
    seed: int = 0,
    *,
    workers: int = 1,
    applied_at: Optional[datetime] = None,
):
    """Build, perturb, and mine: returns (RoleSet, perturbed-matrix abstraction).

    The roles are mined from the perturbed matrix, yet equal the roles of the
    unperturbed one because perturbation preserves supports.
    """
    matrix = build_matrix(log, workers=workers)
    perturbed = perturb_matrix(matrix, noise_bound, seed)
    role_set = mine_roles(perturbed, threshold)
    stamp = applied_at if applied_at is not None else default_applied_at(log)
    metadata = log.privacy_metadata.append(
        operation_kind="addition",
        level="log",
        target_attributes={RESOURCE_KEY},
        parameter_digest=digest(
            {"noise_bound": noise_bound, "threshold": threshold, "seed": seed}
        ),
        applied_at=stamp,
    )
    return role_set, matrix_abstraction(perturbed, metadata)
