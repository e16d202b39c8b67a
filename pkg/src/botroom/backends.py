"""Generation backends: deterministic mock, canned replay, remote chat API.

The mock backend is a pure function of (seed, bundle): it reads the talking
points out of the system prompt it is handed — the same prompt a live model
would see — and fills a fixed, versioned response template. That makes whole
scripted runs replayable byte-for-byte while still exercising the full
prompt -> generate -> parse pipeline.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .prompts import PromptBundle, extract_talking_points

MOCK_TEMPLATE_VERSION = "m1"

_POST_ID_RE = re.compile(r"post ([A-Za-z0-9_-]+)")

# Template fragments are fixed: changing them changes every scripted run.
_POST_LEADS = (
    "ngl this is the part that gets me.",
    "been reading up on prop 86 and it worries me.",
    "cant stop thinking about this one.",
    "thats the thing people keep missing.",
)
_REPLY_LEADS = (
    "i hear you but",
    "fair point, still",
    "respectfully disagree,",
    "maybe, but",
)
_PROSE_WRAPPERS = (
    None,
    None,
    ("here is what i want to say: ", ""),
)


class BackendFailure(Exception):
    pass


@dataclass(frozen=True)
class BackendSpec:
    kind: str  # mock | replay | remote
    seed: Optional[int] = None
    script_path: Optional[str] = None
    endpoint: Optional[str] = None
    model: Optional[str] = None
    api_key_env: Optional[str] = None
    temperature: float = 1.0
    timeout_ms: int = 30000

    def __post_init__(self):
        if self.kind not in ("mock", "replay", "remote"):
            raise ValueError(f"unknown backend kind: {self.kind!r}")


def bundle_fingerprint(seed: int, bundle: PromptBundle) -> int:
    canonical = json.dumps(
        {
            "system": bundle.system_text,
            "messages": [[m.role, m.author_handle, m.text] for m in bundle.messages],
            "focus": bundle.focus_hint,
        },
        sort_keys=True,
        ensure_ascii=True,
    )
    digest = hashlib.sha256(f"{seed}:{canonical}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class MockBackend:
    """Deterministic stand-in for a language model."""

    def __init__(self, seed: int):
        self.seed = seed

    def generate(self, bundle: PromptBundle) -> str:
        fp = bundle_fingerprint(self.seed, bundle)
        points = extract_talking_points(bundle.system_text)
        last_other = next(
            (m for m in reversed(bundle.messages) if m.role == "other"), None
        )

        reply_target = None
        if bundle.focus_hint:
            match = _POST_ID_RE.search(bundle.focus_hint)
            if match and last_other is not None and bundle.messages[-1].role == "other":
                reply_target = match.group(1)

        if points:
            claim_id, claim_text = points[fp % len(points)]
            if reply_target is not None:
                lead = _REPLY_LEADS[(fp // 8) % len(_REPLY_LEADS)]
                body = f"@{last_other.author_handle} {lead} {claim_text}"
                action, target = "reply", reply_target
                thought = f"addressing the notification; talking point ({claim_id}) fits here"
            else:
                lead = _POST_LEADS[(fp // 8) % len(_POST_LEADS)]
                at = f"@{last_other.author_handle} " if last_other is not None else ""
                body = f"{at}{lead} {claim_text}"
                action, target = "post", None
                thought = f"nothing pending; pushing talking point ({claim_id})"
        else:
            if last_other is not None:
                body = f"@{last_other.author_handle} what makes you say that?"
            else:
                body = "first time posting here, mostly been lurking so far."
            if reply_target is not None:
                action, target = "reply", reply_target
            else:
                action, target = "post", None
            thought = "no talking points assigned; staying conversational"

        envelope = json.dumps(
            {"thought": thought, "action": action, "target": target, "body": body},
            separators=(", ", ": "),
        )
        wrapper = _PROSE_WRAPPERS[(fp // 32) % len(_PROSE_WRAPPERS)]
        if wrapper is not None:
            return f"{wrapper[0]}{envelope}{wrapper[1]}"
        return envelope


class ReplayBackend:
    """Pops canned raw responses, one per call; fails when exhausted."""

    def __init__(self, responses: list[str]):
        self._responses = list(responses)
        self._cursor = 0

    @classmethod
    def from_script(cls, path: Path) -> "ReplayBackend":
        responses = []
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            value = json.loads(line)
            if not isinstance(value, str):
                raise ValueError(f"replay script lines must be JSON strings: {line!r}")
            responses.append(value)
        return cls(responses)

    def generate(self, bundle: PromptBundle) -> str:
        if self._cursor >= len(self._responses):
            raise BackendFailure("replay script exhausted")
        response = self._responses[self._cursor]
        self._cursor += 1
        return response


class RemoteBackend:
    """One chat-completion call per generation, vendor-neutral."""

    def __init__(self, spec: BackendSpec):
        if not spec.endpoint or not spec.model:
            raise ValueError("remote backend needs endpoint and model")
        self.spec = spec

    def _api_key(self) -> Optional[str]:
        if self.spec.api_key_env:
            return os.environ.get(self.spec.api_key_env)
        return None

    def request_payload(self, bundle: PromptBundle) -> dict:
        messages = [{"role": "system", "content": bundle.system_text}]
        for m in bundle.messages:
            if m.role == "agent":
                messages.append({"role": "assistant", "content": m.text})
            else:
                messages.append({"role": "user", "content": f"@{m.author_handle}: {m.text}"})
        if bundle.focus_hint:
            messages.append({"role": "user", "content": f"[{bundle.focus_hint}]"})
        return {
            "model": self.spec.model,
            "messages": messages,
            "temperature": self.spec.temperature,
        }

    def generate(self, bundle: PromptBundle) -> str:
        payload = json.dumps(self.request_payload(bundle)).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        key = self._api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        request = urllib.request.Request(
            self.spec.endpoint, data=payload, headers=headers, method="POST"
        )
        try:
            with urllib.request.urlopen(request, timeout=self.spec.timeout_ms / 1000.0) as resp:
                data = json.loads(resp.read())
            return data["choices"][0]["message"]["content"]
        except (urllib.error.URLError, OSError, KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise BackendFailure(f"remote generation failed: {exc}") from exc


def build_backend(spec: BackendSpec, base_dir: Optional[Path] = None):
    if spec.kind == "mock":
        if spec.seed is None:
            raise ValueError("mock backend needs a seed")
        return MockBackend(spec.seed)
    if spec.kind == "replay":
        if spec.script_path is None:
            raise ValueError("replay backend needs a script path")
        path = Path(spec.script_path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return ReplayBackend.from_script(path)
    return RemoteBackend(spec)


def generate(backend, bundle: PromptBundle) -> str:
    """Single entry point; see the backend classes for per-kind behavior."""
    return backend.generate(bundle)
