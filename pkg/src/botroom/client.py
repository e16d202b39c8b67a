"""API client used by bot agents and scripted humans.

Agents never touch the store directly; they consume the same wire views a
human's client sees. That keeps the indistinguishability guarantee structural
rather than aspirational.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .server import ApiServer, Request


class ApiFailure(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(f"{status}: {message}")
        self.status = status


@dataclass(frozen=True)
class AccountRef:
    id: str
    handle: str
    display_name: str


@dataclass(frozen=True)
class StatusView:
    id: str
    account: AccountRef
    content: str
    created_at: int
    in_reply_to_id: Optional[str]
    mentions: tuple[AccountRef, ...]
    favourites_count: int


@dataclass(frozen=True)
class NotificationView:
    id: str
    type: str
    account: AccountRef
    status: Optional[StatusView]
    created_at: int


def parse_status(raw: dict) -> StatusView:
    return StatusView(
        id=raw["id"],
        account=AccountRef(
            id=raw["account"]["id"],
            handle=raw["account"]["handle"],
            display_name=raw["account"]["display_name"],
        ),
        content=raw["content"],
        created_at=raw["created_at"],
        in_reply_to_id=raw["in_reply_to_id"],
        mentions=tuple(
            AccountRef(id=m["id"], handle=m["handle"], display_name="") for m in raw["mentions"]
        ),
        favourites_count=raw["favourites_count"],
    )


def parse_notification(raw: dict) -> NotificationView:
    return NotificationView(
        id=raw["id"],
        type=raw["type"],
        account=AccountRef(
            id=raw["account"]["id"],
            handle=raw["account"]["handle"],
            display_name=raw["account"]["display_name"],
        ),
        status=parse_status(raw["status"]) if raw["status"] else None,
        created_at=raw["created_at"],
    )


class InProcessClient:
    """Calls dispatch() directly; same contract as going over HTTP."""

    def __init__(self, api: ApiServer, token: str):
        self.api = api
        self.token = token

    def _call(self, method: str, path: str, query: dict | None = None, body: dict | None = None):
        response = self.api.dispatch(
            Request(method=method, path=path, query=query or {}, body=body, token=self.token)
        )
        if response.status != 200:
            message = response.body.get("error", "") if isinstance(response.body, dict) else ""
            raise ApiFailure(response.status, message)
        return response.body

    def home_timeline(self, limit: int = 30) -> list[StatusView]:
        raw = self._call("GET", "/api/v1/timelines/home", query={"limit": str(limit)})
        return [parse_status(item) for item in raw]

    def notifications(self, unread_only: bool = True) -> list[NotificationView]:
        raw = self._call(
            "GET", "/api/v1/notifications", query={"unread": "true" if unread_only else "false"}
        )
        return [parse_notification(item) for item in raw]

    def post_status(self, body: str, in_reply_to: Optional[str] = None) -> StatusView:
        raw = self._call(
            "POST", "/api/v1/statuses", body={"status": body, "in_reply_to_id": in_reply_to}
        )
        return parse_status(raw)

    def favourite(self, post_id: str) -> StatusView:
        return parse_status(self._call("POST", f"/api/v1/statuses/{post_id}/favourite"))

    def follow(self, account_id: str) -> dict:
        return self._call("POST", f"/api/v1/accounts/{account_id}/follow")
