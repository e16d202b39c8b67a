"""Authenticated request layer over the social store.

Exposes a small Mastodon-compatible endpoint subset. Everything — bot agents,
scripted facilitators, and the web client — goes through `dispatch`, so all
parties see exactly the same wire surface. Responses never include an
account's kind: over the API, bots and humans are indistinguishable.

Endpoints (all require `Authorization: Bearer <token>`):
    POST /api/v1/statuses                  {"status", "in_reply_to_id"}
    GET  /api/v1/timelines/home?limit=N
    GET  /api/v1/notifications?unread=true|false
    POST /api/v1/statuses/:id/favourite
    POST /api/v1/accounts/:id/follow
"""

from __future__ import annotations

import json
import mimetypes
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Optional
from urllib.parse import parse_qsl, urlsplit

from . import store as st

DEFAULT_TIMELINE_LIMIT = 30
MAX_TIMELINE_LIMIT = 40


class Unauthorized(Exception):
    pass


class PortInUse(Exception):
    pass


class SessionTable:
    """token -> account id; insert-only during a run."""

    def __init__(self):
        self._by_token: dict[str, str] = {}

    def register(self, token: str, account_id: str) -> None:
        if not token:
            raise ValueError("empty session token")
        existing = self._by_token.get(token)
        if existing is not None and existing != account_id:
            raise ValueError(f"token already bound to {existing}")
        self._by_token[token] = account_id

    def authenticate(self, token: str) -> str:
        account_id = self._by_token.get(token or "")
        if account_id is None:
            raise Unauthorized("invalid bearer token")
        return account_id


@dataclass
class Request:
    method: str
    path: str
    query: dict[str, str] = field(default_factory=dict)
    body: Any = None
    token: Optional[str] = None


@dataclass
class Response:
    status: int
    body: Any

    def json_bytes(self) -> bytes:
        return json.dumps(self.body, separators=(",", ":")).encode("utf-8")


def _account_ref(account: st.Account) -> dict:
    return {"id": account.id, "handle": account.handle, "display_name": account.display_name}


def status_view(store: st.SocialStore, post: st.Post) -> dict:
    """Wire form of a post. Account kind is deliberately absent."""
    return {
        "id": post.id,
        "account": _account_ref(store.accounts[post.author]),
        "content": post.body,
        "created_at": post.created_at,
        "in_reply_to_id": post.in_reply_to,
        "mentions": [
            {"id": mid, "handle": store.accounts[mid].handle} for mid in post.mentions
        ],
        "favourites_count": store.favourites_count(post.id),
    }


def notification_view(store: st.SocialStore, notification: st.Notification) -> dict:
    post = store.posts.get(notification.post) if notification.post else None
    return {
        "id": notification.id,
        "type": notification.kind,
        "account": _account_ref(store.accounts[notification.source]),
        "status": status_view(store, post) if post else None,
        "created_at": notification.created_at,
    }


class ApiServer:
    """Routes requests onto the store. Holds no state besides sessions."""

    def __init__(self, store: st.SocialStore):
        self.store = store
        self.sessions = SessionTable()

    def authenticate(self, token: str) -> str:
        return self.sessions.authenticate(token)

    def dispatch(self, request: Request) -> Response:
        try:
            actor = self.sessions.authenticate(request.token or "")
        except Unauthorized:
            return Response(401, {"error": "The access token is invalid"})

        segments = [s for s in request.path.split("/") if s]
        if segments[:2] != ["api", "v1"]:
            return Response(404, {"error": "Record not found"})
        route = segments[2:]

        try:
            if request.method == "POST" and route == ["statuses"]:
                return self._post_status(actor, request.body)
            if request.method == "GET" and route == ["timelines", "home"]:
                return self._home_timeline(actor, request.query)
            if request.method == "GET" and route == ["notifications"]:
                return self._notifications(actor, request.query)
            if request.method == "POST" and len(route) == 3 and route[0] == "statuses" and route[2] == "favourite":
                return self._favourite(actor, route[1])
            if request.method == "POST" and len(route) == 3 and route[0] == "accounts" and route[2] == "follow":
                return self._follow(actor, route[1])
        except _BadRequest as exc:
            return Response(400, {"error": str(exc)})
        return Response(404, {"error": "Record not found"})

    def _post_status(self, actor: str, body: Any) -> Response:
        if not isinstance(body, dict):
            raise _BadRequest("request body must be a JSON object")
        if "status" not in body or not isinstance(body["status"], str):
            raise _BadRequest("status is required and must be a string")
        in_reply_to = body.get("in_reply_to_id")
        if in_reply_to is not None and not isinstance(in_reply_to, str):
            raise _BadRequest("in_reply_to_id must be a string or null")
        try:
            post = self.store.append_post(actor, body["status"], in_reply_to)
        except st.UnknownParent:
            return Response(404, {"error": "Record not found"})
        except (st.BodyEmpty, st.BodyTooLong) as exc:
            return Response(422, {"error": f"Validation failed: {exc}"})
        return Response(200, status_view(self.store, post))

    def _home_timeline(self, actor: str, query: dict[str, str]) -> Response:
        raw = query.get("limit", str(DEFAULT_TIMELINE_LIMIT))
        try:
            limit = int(raw)
        except ValueError:
            raise _BadRequest(f"limit must be an integer, got {raw!r}")
        if limit < 1:
            raise _BadRequest("limit must be positive")
        limit = min(limit, MAX_TIMELINE_LIMIT)
        posts = self.store.home_timeline(actor, limit)
        return Response(200, [status_view(self.store, p) for p in posts])

    def _notifications(self, actor: str, query: dict[str, str]) -> Response:
        raw = query.get("unread", "false")
        if raw not in ("true", "false"):
            raise _BadRequest("unread must be true or false")
        notifications = self.store.notifications_for(actor, unread_only=(raw == "true"))
        return Response(200, [notification_view(self.store, n) for n in notifications])

    def _favourite(self, actor: str, post_id: str) -> Response:
        try:
            self.store.favourite_post(actor, post_id)
        except st.UnknownPost:
            return Response(404, {"error": "Record not found"})
        return Response(200, status_view(self.store, self.store.posts[post_id]))

    def _follow(self, actor: str, target_id: str) -> Response:
        try:
            self.store.follow_account(actor, target_id)
        except st.UnknownAccount:
            return Response(404, {"error": "Record not found"})
        except st.SelfFollow:
            return Response(422, {"error": "Validation failed: cannot follow yourself"})
        return Response(200, {"id": target_id, "following": True})


class _BadRequest(Exception):
    pass


# ---------------------------------------------------------------------------
# HTTP adapter (live mode)
# ---------------------------------------------------------------------------


def _make_handler(api: ApiServer, ui_dir: Optional[Path]):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _bearer_token(self) -> Optional[str]:
            header = self.headers.get("Authorization", "")
            if header.startswith("Bearer "):
                return header[len("Bearer "):]
            return None

        def _send_json(self, response: Response) -> None:
            payload = response.json_bytes()
            self.send_response(response.status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self._cors()
            self.end_headers()
            self.wfile.write(payload)

        def _cors(self) -> None:
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Authorization, Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")

        def do_OPTIONS(self):
            self.send_response(204)
            self._cors()
            self.send_header("Content-Length", "0")
            self.end_headers()

        def _handle_api(self, method: str) -> None:
            parts = urlsplit(self.path)
            body = None
            length = int(self.headers.get("Content-Length") or 0)
            if length:
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw)
                except json.JSONDecodeError:
                    self._send_json(Response(400, {"error": "request body is not valid JSON"}))
                    return
            request = Request(
                method=method,
                path=parts.path,
                query=dict(parse_qsl(parts.query)),
                body=body,
                token=self._bearer_token(),
            )
            self._send_json(api.dispatch(request))

        def _serve_static(self) -> None:
            assert ui_dir is not None
            rel = urlsplit(self.path).path.lstrip("/") or "index.html"
            target = (ui_dir / rel).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                self._send_json(Response(404, {"error": "Not found"}))
                return
            payload = target.read_bytes()
            self.send_response(200)
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            if urlsplit(self.path).path.startswith("/api/"):
                self._handle_api("GET")
            elif ui_dir is not None:
                self._serve_static()
            else:
                self._send_json(Response(404, {"error": "Not found"}))

        def do_POST(self):
            self._handle_api("POST")

    return Handler


class HttpFrontend:
    """Threaded HTTP server wrapping an ApiServer for live runs."""

    def __init__(self, api: ApiServer, port: int, ui_dir: Optional[Path] = None):
        try:
            self._httpd = ThreadingHTTPServer(("0.0.0.0", port), _make_handler(api, ui_dir))
        except OSError as exc:
            raise PortInUse(f"port {port}: {exc}") from exc
        self.port = self._httpd.server_address[1]
        self._thread: Optional[threading.Thread] = None

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join(timeout=5)
