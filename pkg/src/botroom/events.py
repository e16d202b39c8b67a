"""Append-only event log: the replayable record of everything that happened.

Each event serializes to one line of JSON with exactly the fields
{"seq", "at", "event", "data"}. The file is the interchange format between a
finished run and the offline analysis tools (propagation report, transcript),
and replaying it from an empty store must reproduce the store exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

ACCOUNT_CREATED = "account_created"
POST_CREATED = "post_created"
FAVOURITED = "favourited"
FOLLOWED = "followed"
NOTIFICATION_CREATED = "notification_created"
TIMELINE_FETCHED = "timeline_fetched"
NOTIFICATIONS_FETCHED = "notifications_fetched"

EVENT_KINDS = frozenset(
    {
        ACCOUNT_CREATED,
        POST_CREATED,
        FAVOURITED,
        FOLLOWED,
        NOTIFICATION_CREATED,
        TIMELINE_FETCHED,
        NOTIFICATIONS_FETCHED,
    }
)


class CorruptLog(Exception):
    """The event log cannot be parsed or replayed consistently."""


@dataclass(frozen=True)
class Event:
    seq: int
    at: int
    event: str
    data: dict[str, Any]

    def to_line(self) -> str:
        # Field order is part of the format; keep it stable byte-for-byte.
        return json.dumps(
            {"seq": self.seq, "at": self.at, "event": self.event, "data": self.data},
            separators=(",", ":"),
        )


def parse_line(line: str) -> Event:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptLog(f"unparseable event line: {exc}") from exc
    if not isinstance(raw, dict) or set(raw) != {"seq", "at", "event", "data"}:
        raise CorruptLog(f"event line has wrong fields: {sorted(raw) if isinstance(raw, dict) else raw!r}")
    if raw["event"] not in EVENT_KINDS:
        raise CorruptLog(f"unknown event kind: {raw['event']!r}")
    if not isinstance(raw["seq"], int) or not isinstance(raw["at"], int):
        raise CorruptLog("seq and at must be integers")
    if not isinstance(raw["data"], dict):
        raise CorruptLog("data must be an object")
    return Event(seq=raw["seq"], at=raw["at"], event=raw["event"], data=raw["data"])


def dump_log(events: Iterable[Event]) -> str:
    return "".join(e.to_line() + "\n" for e in events)


def load_log(text: str) -> list[Event]:
    events = []
    for line in text.splitlines():
        if not line.strip():
            continue
        events.append(parse_line(line))
    _check_sequence(events)
    return events


def _check_sequence(events: list[Event]) -> None:
    prev_at = None
    for i, event in enumerate(events):
        if event.seq != i + 1:
            raise CorruptLog(f"seq gap: expected {i + 1}, got {event.seq}")
        if prev_at is not None and event.at < prev_at:
            raise CorruptLog(f"timestamps decrease at seq {event.seq}")
        prev_at = event.at
