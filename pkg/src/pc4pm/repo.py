"""File-backed, content-addressed repository of logs and abstractions.

Entry ids are content-hash prefixes, so storing identical bytes twice yields
the same entry and reruns of deterministic jobs are detected for free.
Deletion only tombstones the listing: stored bytes are immutable and lineage
references to deleted ancestors keep resolving.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .ela import parse_ela
from .errors import ParseFailure, Pc4pmError, UnknownEntry
from .util import content_id, format_timestamp, parse_timestamp, truncate_millis
from .xes import parse_xes

REPO_ENV = "PC4PM_REPO"

ENTRY_KINDS = ("xes", "ela")


@dataclass(frozen=True)
class RepoEntry:
    entry_id: str
    kind: str
    name: str
    created_at: datetime
    parent_ids: tuple = ()
    technique: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "kind": self.kind,
            "name": self.name,
            "created_at": format_timestamp(self.created_at),
            "parent_ids": list(self.parent_ids),
            "technique": self.technique,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RepoEntry":
        return cls(
            entry_id=doc["entry_id"],
            kind=doc["kind"],
            name=doc["name"],
            created_at=parse_timestamp(doc["created_at"]),
            parent_ids=tuple(doc.get("parent_ids", ())),
            technique=doc.get("technique"),
        )


def default_root() -> Path:
    env = os.environ.get(REPO_ENV)
    if env:
        return Path(env)
    return Path.home() / ".pc4pm"


class Repository:
    """Stores raw artifact bytes under objects/ and entry metadata under entries/."""

    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_root()
        self._objects = self.root / "objects"
        self._entries = self.root / "entries"
        self._tombstones = self.root / "tombstones"
        for directory in (self._objects, self._entries, self._tombstones):
            directory.mkdir(parents=True, exist_ok=True)
        # all writes go through one lock: the single-committer rule
        self._lock = threading.Lock()

    # -- storing ------------------------------------------------------------

    def store(
        self,
        content: bytes,
        kind: str,
        name: str,
        parents=(),
        technique: Optional[str] = None,
    ) -> RepoEntry:
        if kind not in ENTRY_KINDS:
            raise ParseFailure(f"unknown entry kind: {kind!r}")
        try:
            if kind == "xes":
                parse_xes(content)
            else:
                parse_ela(content)
        except Pc4pmError as exc:
            raise ParseFailure(f"content does not parse as {kind}: {exc}") from exc
        parents = tuple(parents)
        with self._lock:
            for parent in parents:
                if not (self._entries / f"{parent}.json").exists():
                    raise UnknownEntry(f"parent entry {parent!r} does not exist")
            entry_id = content_id(content)
            meta_path = self._entries / f"{entry_id}.json"
            if meta_path.exists():
                # identical bytes were stored before; the original entry wins
                return RepoEntry.from_dict(json.loads(meta_path.read_text("utf-8")))
            entry = RepoEntry(
                entry_id=entry_id,
                kind=kind,
                name=name,
                created_at=truncate_millis(datetime.now(timezone.utc)),
                parent_ids=parents,
                technique=technique,
            )
            (self._objects / entry_id).write_bytes(content)
            meta_path.write_text(json.dumps(entry.as_dict(), indent=2) + "\n", "utf-8")
            return entry

    # -- reading ------------------------------------------------------------

    def _is_deleted(self, entry_id: str) -> bool:
        return (self._tombstones / entry_id).exists()

    def get(self, entry_id: str, include_deleted: bool = False) -> RepoEntry:
        meta_path = self._entries / f"{entry_id}.json"
        if not meta_path.exists():
            raise UnknownEntry(f"entry {entry_id!r} does not exist")
        if not include_deleted and self._is_deleted(entry_id):
            raise UnknownEntry(f"entry {entry_id!r} was deleted")
        return RepoEntry.from_dict(json.loads(meta_path.read_text("utf-8")))

    def content(self, entry_id: str) -> bytes:
        self.get(entry_id)
        return (self._objects / entry_id).read_bytes()

    def list_entries(self) -> list:
        entries = []
        for meta_path in sorted(self._entries.glob("*.json")):
            entry = RepoEntry.from_dict(json.loads(meta_path.read_text("utf-8")))
            if not self._is_deleted(entry.entry_id):
                entries.append(entry)
        entries.sort(key=lambda e: (e.created_at, e.entry_id))
        return entries

    # -- deleting -----------------------------------------------------------

    def delete(self, entry_id: str):
        with self._lock:
            if not (self._entries / f"{entry_id}.json").exists():
                raise UnknownEntry(f"entry {entry_id!r} does not exist")
            (self._tombstones / entry_id).touch()

    # -- lineage ------------------------------------------------------------

    def lineage(self, entry_id: str) -> dict:
        """All ancestors of an entry, with the producing technique per edge."""
        root = self.get(entry_id, include_deleted=True)
        nodes, edges = {}, []
        queue = [root]
        while queue:
            entry = queue.pop(0)
            if entry.entry_id in nodes:
                continue
            nodes[entry.entry_id] = entry
            for parent_id in entry.parent_ids:
                edges.append(
                    {
                        "from": parent_id,
                        "to": entry.entry_id,
                        "technique": entry.technique,
                    }
                )
                try:
                    queue.append(self.get(parent_id, include_deleted=True))
                except UnknownEntry:
                    continue
        node_docs = []
        for eid in sorted(nodes):
            doc = nodes[eid].as_dict()
            doc["deleted"] = self._is_deleted(eid)
            node_docs.append(doc)
        return {"root": entry_id, "nodes": node_docs, "edges": edges}
