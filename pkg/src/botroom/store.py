"""In-memory social-network store: accounts, posts, likes, follows, notifications.

Single-writer model: every operation (including reads, because reads log
fetch events) is serialized under one lock, and the event log's seq is the
serialization witness. Replaying a log from an empty store reproduces the
store exactly, which is what makes runs traceable after the fact.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import events as ev
from .clock import VirtualClock

HANDLE_RE = re.compile(r"^[a-z0-9_]{1,30}$")
MENTION_TOKEN_RE = re.compile(r"@([A-Za-z0-9_]+)")
MAX_BODY_CHARS = 500

ACCOUNT_KINDS = ("bot", "human", "facilitator")
NOTIFICATION_KINDS = ("mention", "reply", "favourite", "follow")


class StoreError(Exception):
    pass


class UnknownAccount(StoreError):
    pass


class UnknownAuthor(StoreError):
    pass


class UnknownPost(StoreError):
    pass


class UnknownParent(StoreError):
    pass


class BodyEmpty(StoreError):
    pass


class BodyTooLong(StoreError):
    pass


class SelfFollow(StoreError):
    pass


class InvalidHandle(StoreError):
    pass


class DuplicateHandle(StoreError):
    pass


@dataclass
class Account:
    id: str
    handle: str
    display_name: str
    kind: str  # bot | human | facilitator; never leaves the store over the API
    created_at: int


@dataclass
class Post:
    id: str
    author: str
    body: str
    created_at: int
    seq: int  # seq of the post_created event; timeline tie-breaker
    in_reply_to: Optional[str] = None
    mentions: list[str] = field(default_factory=list)


@dataclass
class Notification:
    id: str
    recipient: str
    kind: str
    source: str
    post: Optional[str]
    created_at: int
    read: bool = False


def parse_mentions(body: str, known_handles: Iterable[str]) -> list[str]:
    """Extract @-mention handles from a post body.

    A token is "@" followed by [A-Za-z0-9_]+; it ends at the first character
    outside that class. Matching against known handles is case-insensitive,
    unknown handles are silently dropped, and the result is deduplicated in
    first-occurrence order.
    """
    known = {h.lower() for h in known_handles}
    seen: list[str] = []
    for match in MENTION_TOKEN_RE.finditer(body):
        handle = match.group(1).lower()
        if handle in known and handle not in seen:
            seen.append(handle)
    return seen


class SocialStore:
    """The shared conversation room, backed by an append-only event log."""

    def __init__(self, clock: VirtualClock | None = None):
        self.clock = clock if clock is not None else VirtualClock(0)
        self.accounts: dict[str, Account] = {}
        self.posts: dict[str, Post] = {}
        self.notifications: dict[str, Notification] = {}
        self.favourites: dict[str, list[str]] = {}  # post id -> actor ids, insertion order
        self.follows: dict[str, list[str]] = {}  # actor id -> target ids, insertion order
        self.log: list[ev.Event] = []
        self._by_handle: dict[str, str] = {}
        self._inbox: dict[str, list[str]] = {}  # recipient id -> notification ids, oldest first
        self._account_n = 0
        self._post_n = 0
        self._notification_n = 0
        self._last_at = 0
        self._lock = threading.RLock()

    # ------------------------------------------------------------------
    # time and log plumbing
    # ------------------------------------------------------------------

    def _tick(self) -> int:
        # Event times never decrease, whatever the clock does.
        at = max(self.clock.now_ms(), self._last_at)
        self._last_at = at
        return at

    def _emit(self, at: int, kind: str, data: dict) -> ev.Event:
        event = ev.Event(seq=len(self.log) + 1, at=at, event=kind, data=data)
        self.log.append(event)
        return event

    def dump_log(self) -> str:
        with self._lock:
            return ev.dump_log(self.log)

    # ------------------------------------------------------------------
    # accounts
    # ------------------------------------------------------------------

    def create_account(self, handle: str, display_name: str, kind: str) -> Account:
        with self._lock:
            handle = handle.lower()
            if not HANDLE_RE.match(handle):
                raise InvalidHandle(f"bad handle: {handle!r}")
            if handle in self._by_handle:
                raise DuplicateHandle(handle)
            if kind not in ACCOUNT_KINDS:
                raise StoreError(f"unknown account kind: {kind!r}")
            at = self._tick()
            self._account_n += 1
            account = Account(
                id=f"a{self._account_n}",
                handle=handle,
                display_name=display_name,
                kind=kind,
                created_at=at,
            )
            self.accounts[account.id] = account
            self._by_handle[handle] = account.id
            self._inbox[account.id] = []
            self._emit(
                at,
                ev.ACCOUNT_CREATED,
                {
                    "id": account.id,
                    "handle": account.handle,
                    "display_name": account.display_name,
                    "kind": account.kind,
                },
            )
            return account

    def account_by_handle(self, handle: str) -> Account:
        account_id = self._by_handle.get(handle.lower())
        if account_id is None:
            raise UnknownAccount(handle)
        return self.accounts[account_id]

    def _require_account(self, account_id: str) -> Account:
        account = self.accounts.get(account_id)
        if account is None:
            raise UnknownAccount(account_id)
        return account

    # ------------------------------------------------------------------
    # posts
    # ------------------------------------------------------------------

    def append_post(self, author: str, body: str, in_reply_to: Optional[str] = None) -> Post:
        with self._lock:
            if author not in self.accounts:
                raise UnknownAuthor(author)
            parent = None
            if in_reply_to is not None:
                parent = self.posts.get(in_reply_to)
                if parent is None:
                    raise UnknownParent(in_reply_to)
            if len(body) == 0:
                raise BodyEmpty("post body is empty")
            if len(body) > MAX_BODY_CHARS:
                raise BodyTooLong(f"{len(body)} > {MAX_BODY_CHARS}")

            at = self._tick()
            if parent is not None and parent.created_at >= at:
                # A reply must postdate its parent; same-tick replies land one
                # tick later and the log stays monotonic via _last_at.
                at = parent.created_at + 1
                self._last_at = at

            mention_handles = parse_mentions(body, self._by_handle.keys())
            mention_ids = [self._by_handle[h] for h in mention_handles]

            self._post_n += 1
            post = Post(
                id=f"p{self._post_n}",
                author=author,
                body=body,
                created_at=at,
                seq=len(self.log) + 1,
                in_reply_to=in_reply_to,
                mentions=mention_ids,
            )
            self.posts[post.id] = post
            self._emit(
                at,
                ev.POST_CREATED,
                {
                    "id": post.id,
                    "author": author,
                    "body": body,
                    "in_reply_to": in_reply_to,
                    "mentions": mention_ids,
                },
            )

            notified: set[str] = set()
            if parent is not None and parent.author != author:
                self._notify(at, parent.author, "reply", author, post.id)
                notified.add(parent.author)
            for mention_id in mention_ids:
                if mention_id != author and mention_id not in notified:
                    self._notify(at, mention_id, "mention", author, post.id)
                    notified.add(mention_id)
            return post

    def _notify(self, at: int, recipient: str, kind: str, source: str, post_id: Optional[str]) -> None:
        if recipient == source:
            return
        self._notification_n += 1
        notification = Notification(
            id=f"n{self._notification_n}",
            recipient=recipient,
            kind=kind,
            source=source,
            post=post_id,
            created_at=at,
        )
        self.notifications[notification.id] = notification
        self._inbox[recipient].append(notification.id)
        self._emit(
            at,
            ev.NOTIFICATION_CREATED,
            {
                "id": notification.id,
                "recipient": recipient,
                "kind": kind,
                "source": source,
                "post": post_id,
            },
        )

    # ------------------------------------------------------------------
    # reads (logged: fetches are what make exposure computable)
    # ------------------------------------------------------------------

    def home_timeline(self, viewer: str, limit: int) -> list[Post]:
        with self._lock:
            self._require_account(viewer)
            if limit < 1:
                raise ValueError("limit must be a positive integer")
            ordered = sorted(
                self.posts.values(), key=lambda p: (p.created_at, p.seq), reverse=True
            )
            page = ordered[:limit]
            at = self._tick()
            self._emit(
                at, ev.TIMELINE_FETCHED, {"account": viewer, "posts": [p.id for p in page]}
            )
            return page

    def notifications_for(self, recipient: str, unread_only: bool = False) -> list[Notification]:
        with self._lock:
            self._require_account(recipient)
            inbox = [self.notifications[nid] for nid in reversed(self._inbox[recipient])]
            if unread_only:
                inbox = [n for n in inbox if not n.read]
            at = self._tick()
            self._emit(
                at,
                ev.NOTIFICATIONS_FETCHED,
                {"account": recipient, "notifications": [n.id for n in inbox]},
            )
            return inbox

    # ------------------------------------------------------------------
    # likes and follows (idempotent; repeats log nothing)
    # ------------------------------------------------------------------

    def favourite_post(self, actor: str, post_id: str) -> None:
        with self._lock:
            self._require_account(actor)
            post = self.posts.get(post_id)
            if post is None:
                raise UnknownPost(post_id)
            actors = self.favourites.setdefault(post_id, [])
            if actor in actors:
                return
            actors.append(actor)
            at = self._tick()
            self._emit(at, ev.FAVOURITED, {"actor": actor, "post": post_id})
            self._notify(at, post.author, "favourite", actor, post_id)

    def follow_account(self, actor: str, target: str) -> None:
        with self._lock:
            self._require_account(actor)
            self._require_account(target)
            if actor == target:
                raise SelfFollow(actor)
            targets = self.follows.setdefault(actor, [])
            if target in targets:
                return
            targets.append(target)
            at = self._tick()
            self._emit(at, ev.FOLLOWED, {"actor": actor, "target": target})
            self._notify(at, target, "follow", actor, None)

    def favourites_count(self, post_id: str) -> int:
        return len(self.favourites.get(post_id, ()))

    # ------------------------------------------------------------------
    # replay
    # ------------------------------------------------------------------

    def state_snapshot(self) -> dict:
        """Comparable view of the full store state (tests, replay checks)."""
        with self._lock:
            return {
                "accounts": {a.id: vars(a).copy() for a in self.accounts.values()},
                "posts": {p.id: {**vars(p), "mentions": list(p.mentions)} for p in self.posts.values()},
                "notifications": {n.id: vars(n).copy() for n in self.notifications.values()},
                "favourites": {k: list(v) for k, v in self.favourites.items()},
                "follows": {k: list(v) for k, v in self.follows.items()},
            }

    @classmethod
    def replay(cls, log: list[ev.Event]) -> "SocialStore":
        """Rebuild a store from its event log.

        Events are applied structurally (recorded ids and timestamps are
        reused verbatim), so the rebuilt store re-serializes to the same log.
        """
        ev._check_sequence(log)
        store = cls(VirtualClock(0))
        for event in log:
            store._apply(event)
        return store

    def _apply(self, event: ev.Event) -> None:
        data = event.data
        try:
            if event.event == ev.ACCOUNT_CREATED:
                account = Account(
                    id=data["id"],
                    handle=data["handle"],
                    display_name=data["display_name"],
                    kind=data["kind"],
                    created_at=event.at,
                )
                if account.handle in self._by_handle:
                    raise ev.CorruptLog(f"duplicate handle in log: {account.handle}")
                self.accounts[account.id] = account
                self._by_handle[account.handle] = account.id
                self._inbox[account.id] = []
                self._account_n = max(self._account_n, _id_number(account.id))
            elif event.event == ev.POST_CREATED:
                if data["author"] not in self.accounts:
                    raise ev.CorruptLog(f"post by unknown author: {data['author']}")
                if data["in_reply_to"] is not None and data["in_reply_to"] not in self.posts:
                    raise ev.CorruptLog(f"reply to unknown post: {data['in_reply_to']}")
                post = Post(
                    id=data["id"],
                    author=data["author"],
                    body=data["body"],
                    created_at=event.at,
                    seq=event.seq,
                    in_reply_to=data["in_reply_to"],
                    mentions=list(data["mentions"]),
                )
                self.posts[post.id] = post
                self._post_n = max(self._post_n, _id_number(post.id))
            elif event.event == ev.NOTIFICATION_CREATED:
                if data["recipient"] not in self.accounts or data["source"] not in self.accounts:
                    raise ev.CorruptLog("notification references unknown account")
                notification = Notification(
                    id=data["id"],
                    recipient=data["recipient"],
                    kind=data["kind"],
                    source=data["source"],
                    post=data["post"],
                    created_at=event.at,
                )
                self.notifications[notification.id] = notification
                self._inbox[notification.recipient].append(notification.id)
                self._notification_n = max(self._notification_n, _id_number(notification.id))
            elif event.event == ev.FAVOURITED:
                if data["post"] not in self.posts:
                    raise ev.CorruptLog(f"favourite of unknown post: {data['post']}")
                self.favourites.setdefault(data["post"], []).append(data["actor"])
            elif event.event == ev.FOLLOWED:
                if data["actor"] not in self.accounts or data["target"] not in self.accounts:
                    raise ev.CorruptLog("follow references unknown account")
                self.follows.setdefault(data["actor"], []).append(data["target"])
            elif event.event in (ev.TIMELINE_FETCHED, ev.NOTIFICATIONS_FETCHED):
                if data["account"] not in self.accounts:
                    raise ev.CorruptLog("fetch by unknown account")
            else:
                raise ev.CorruptLog(f"unknown event kind: {event.event}")
        except KeyError as exc:
            raise ev.CorruptLog(f"event {event.seq} missing field {exc}") from exc
        self.log.append(event)
        self._last_at = event.at


def _id_number(opaque_id: str) -> int:
    digits = "".join(ch for ch in opaque_id if ch.isdigit())
    return int(digits) if digits else 0
