"""Technique registry and the four-step guide's filtering.

Each technique carries a four-dimension signature: the process-mining
perspective it serves (PMPS), the process-mining activity it supports (PMAC),
the privacy perspective it protects (PRPS), and the privacy activity it
performs (PRAC).  The guide narrows the technique list by intersecting one
optional choice per dimension.  The table and per-parameter help texts live in
a JSON data file so they can be edited without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .errors import ModelInvariantError, UnknownTechnique

PMPS = ("control-flow", "time", "organizational", "case-data")
PMAC = ("discovery", "conformance", "performance", "role-mining")
PRPS = ("case", "resource")
PRAC = ("PPDP", "PPPM", "PrAn")

DIMENSIONS = {"pmps": PMPS, "pmac": PMAC, "prps": PRPS, "prac": PRAC}


@dataclass(frozen=True)
class TechniqueSignature:
    technique_id: str
    summary: str
    pmps: frozenset
    pmac: frozenset
    prps: frozenset
    prac: frozenset

    def __post_init__(self):
        for dimension, vocabulary in DIMENSIONS.items():
            values = frozenset(getattr(self, dimension))
            if not values:
                raise ModelInvariantError(
                    f"{self.technique_id}: dimension {dimension} must not be empty"
                )
            unknown = values - set(vocabulary)
            if unknown:
                raise ModelInvariantError(
                    f"{self.technique_id}: unknown {dimension} values {sorted(unknown)}"
                )
            object.__setattr__(self, dimension, values)

    def as_dict(self) -> dict:
        return {
            "technique_id": self.technique_id,
            "summary": self.summary,
            "pmps": sorted(self.pmps),
            "pmac": sorted(self.pmac),
            "prps": sorted(self.prps),
            "prac": sorted(self.prac),
        }


@dataclass(frozen=True)
class GuideQuery:
    """One optional choice per dimension; None means wildcard."""

    pmps: Optional[str] = None
    pmac: Optional[str] = None
    prps: Optional[str] = None
    prac: Optional[str] = None

    def __post_init__(self):
        for dimension, vocabulary in DIMENSIONS.items():
            choice = getattr(self, dimension)
            if choice is not None and choice not in vocabulary:
                raise ModelInvariantError(
                    f"unknown {dimension} choice: {choice!r} (expected one of {list(vocabulary)})"
                )


_cached_doc = None


def _registry_doc() -> dict:
    global _cached_doc
    if _cached_doc is None:
        raw = resources.files("pc4pm").joinpath("data/registry.json").read_text("utf-8")
        _cached_doc = json.loads(raw)
    return _cached_doc


def registry() -> list:
    """The built-in technique table, in shipped order."""
    return [
        TechniqueSignature(
            technique_id=entry["technique_id"],
            summary=entry.get("summary", ""),
            pmps=frozenset(entry["pmps"]),
            pmac=frozenset(entry["pmac"]),
            prps=frozenset(entry["prps"]),
            prac=frozenset(entry["prac"]),
        )
        for entry in _registry_doc()["techniques"]
    ]


def filter_techniques(query: GuideQuery) -> list:
    """Technique ids whose signature contains every chosen dimension value."""
    matches = []
    for signature in registry():
        if all(
            getattr(query, dimension) is None
            or getattr(query, dimension) in getattr(signature, dimension)
            for dimension in DIMENSIONS
        ):
            matches.append(signature.technique_id)
    return matches


def runner_schemas() -> dict:
    """Parameter schemas (with help tooltips) for every runnable technique."""
    return _registry_doc()["runners"]


def runner_schema(technique_id: str) -> dict:
    runners = runner_schemas()
    if technique_id not in runners:
        raise UnknownTechnique(f"unknown technique: {technique_id!r}")
    return runners[technique_id]
