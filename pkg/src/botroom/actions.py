"""Structured-output contract: one JSON action envelope per generation.

Extraction is tolerant (models wrap JSON in prose; the first balanced object
wins), validation is strict: an envelope that names an action must carry
exactly the fields that action needs, and post bodies obey the 1-500
character limit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .store import MAX_BODY_CHARS

ACTIONS = ("post", "reply", "favourite", "follow", "none")
_NEEDS_BODY = ("post", "reply")
_NEEDS_TARGET = ("reply", "favourite", "follow")


class ParseError(Exception):
    pass


@dataclass(frozen=True)
class ActionEnvelope:
    thought: str
    action: str
    target: Optional[str] = None
    body: Optional[str] = None

    def validate(self) -> "ActionEnvelope":
        if self.action not in ACTIONS:
            raise ParseError(f"unknown action: {self.action!r}")
        if self.action in _NEEDS_BODY:
            if not self.body:
                raise ParseError(f"action {self.action!r} requires a body")
            if len(self.body) > MAX_BODY_CHARS:
                raise ParseError(f"body is {len(self.body)} chars, limit {MAX_BODY_CHARS}")
        elif self.body is not None:
            raise ParseError(f"action {self.action!r} must not carry a body")
        if self.action in _NEEDS_TARGET:
            if not self.target:
                raise ParseError(f"action {self.action!r} requires a target")
        elif self.target is not None:
            raise ParseError(f"action {self.action!r} must not carry a target")
        return self


def serialize_action(envelope: ActionEnvelope) -> str:
    return json.dumps(
        {
            "thought": envelope.thought,
            "action": envelope.action,
            "target": envelope.target,
            "body": envelope.body,
        },
        separators=(",", ":"),
    )


def _first_json_object(raw: str) -> dict:
    decoder = json.JSONDecoder()
    index = raw.find("{")
    while index != -1:
        try:
            value, _ = decoder.raw_decode(raw, index)
        except json.JSONDecodeError:
            index = raw.find("{", index + 1)
            continue
        if isinstance(value, dict):
            return value
        index = raw.find("{", index + 1)
    raise ParseError("no JSON object found in model output")


def parse_action(raw: str) -> ActionEnvelope:
    """Parse model output into a validated envelope.

    Leading/trailing prose around the JSON object is tolerated; strictness
    lives in the envelope validation, not the extraction.
    """
    obj = _first_json_object(raw)
    action = obj.get("action")
    if not isinstance(action, str):
        raise ParseError("envelope has no action string")
    thought = obj.get("thought")
    if thought is None:
        thought = ""
    if not isinstance(thought, str):
        raise ParseError("thought must be a string")
    target = obj.get("target")
    if target is not None and not isinstance(target, str):
        raise ParseError("target must be a string or null")
    body = obj.get("body")
    if body is not None and not isinstance(body, str):
        raise ParseError("body must be a string or null")
    return ActionEnvelope(thought=thought, action=action, target=target, body=body).validate()
