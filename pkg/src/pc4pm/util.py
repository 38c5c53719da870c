"""Shared helpers: hashing, seeding, timestamp handling, parallel mapping."""

from __future__ import annotations

import hashlib
import json
import re
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta, timezone

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

_TS_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2})"
    r"(?:\.(\d{1,9}))?"
    r"(Z|[+-]\d{2}:?\d{2})?$"
)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp into a UTC datetime at millisecond precision.

    Accepts 'Z', '+HH:MM' and '+HHMM' offsets; naive timestamps are taken as UTC.
    Raises ValueError on anything else.
    """
    m = _TS_RE.match(text.strip())
    if not m:
        raise ValueError(f"unparseable timestamp: {text!r}")
    year, month, day, hour, minute, second = (int(g) for g in m.groups()[:6])
    frac = m.group(7) or ""
    micro = int(frac.ljust(6, "0")[:6]) if frac else 0
    tz = m.group(8)
    if tz is None or tz == "Z":
        offset = timedelta(0)
    else:
        sign = 1 if tz[0] == "+" else -1
        hh, mm = int(tz[1:3]), int(tz[-2:])
        offset = sign * timedelta(hours=hh, minutes=mm)
    dt = datetime(year, month, day, hour, minute, second, micro, tzinfo=timezone.utc)
    return truncate_millis(dt - offset)


def truncate_millis(dt: datetime) -> datetime:
    """Normalize to UTC and drop sub-millisecond precision."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    else:
        dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


def format_timestamp(dt: datetime) -> str:
    """Canonical ISO-8601 UTC rendering with exactly three fractional digits."""
    dt = truncate_millis(dt)
    return dt.strftime("%Y-%m-%dT%H:%M:%S") + ".%03d+00:00" % (dt.microsecond // 1000)


def digest(params: dict, length: int = 12) -> str:
    """Short opaque hash of a parameter mapping (canonical JSON, sha256 prefix)."""
    blob = json.dumps(params, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:length]


def content_id(raw: bytes, length: int = 16) -> str:
    return hashlib.sha256(raw).hexdigest()[:length]


def derived_seed(*parts) -> int:
    """Stable sub-seed from a base seed plus arbitrary string/int context parts."""
    blob = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def parallel_map(fn, items, workers: int = 1):
    """Map fn over items in order, optionally across a thread pool.

    Results are merged in input order, so the outcome never depends on the
    worker count or on scheduling.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
