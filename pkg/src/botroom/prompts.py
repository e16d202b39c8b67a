"""Prompt assembly and context-window management for bot agents.

The system prompt is a deterministic concatenation of fixed sections, so
identical inputs always produce byte-identical prompts: persona, stance,
talking points (the assigned falsehoods, in claim-id order), style rules,
and the structured-output instructions (versioned).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .claims import Claim, UnknownClaim, claims_by_id

PERSONA_HEADER = "PERSONA:"
STANCE_HEADER = "STANCE:"
TALKING_POINTS_HEADER = "TALKING POINTS:"
STYLE_HEADER = "STYLE RULES:"
FORMAT_HEADER = "OUTPUT FORMAT"

# Named style rules expand to instructions; unrecognized rules pass through
# verbatim so personas can carry bespoke direction.
STYLE_RULE_TEXT = {
    "lowercase-i": "write the pronoun \"i\" in lowercase and keep capitalization casual",
    "shorthand": "use social-media shorthand and colloquial spelling where natural (ngl, imo, rn)",
    "no-hashtags": "do not use hashtags",
    "short-posts": "keep posts short, one or two sentences",
}

OUTPUT_FORMAT_V1 = (
    "Respond with exactly one JSON object and nothing else:\n"
    '{"thought": string, "action": "post"|"reply"|"favourite"|"follow"|"none", '
    '"target": string|null, "body": string|null}\n'
    "- thought: your private reasoning, never shown to anyone.\n"
    "- post: body required, target null. reply/favourite: target is a post id. "
    "follow: target is an account id.\n"
    "- body must be 1-500 characters.\n"
    '- if you have nothing worth adding, use action "none".'
)

FORMAT_VERSIONS = {"v1": OUTPUT_FORMAT_V1}

_TALKING_POINT_RE = re.compile(r"^\((\d+)\) (.*)$")


@dataclass
class Message:
    role: str  # "agent" (own) | "other"
    author_handle: str
    text: str


@dataclass
class PromptBundle:
    system_text: str
    messages: list[Message] = field(default_factory=list)
    focus_hint: Optional[str] = None


def assemble_system_prompt(persona, claims: list[Claim], output_format_version: str = "v1") -> str:
    """Build the system prompt. Section order is fixed; output is byte-stable."""
    if output_format_version not in FORMAT_VERSIONS:
        raise ValueError(f"unknown output format version: {output_format_version!r}")
    registry = claims_by_id(claims)
    assigned = []
    for claim_id in sorted(persona.claims):
        if claim_id not in registry:
            raise UnknownClaim(claim_id)
        assigned.append(registry[claim_id])

    sections = [
        f"{PERSONA_HEADER}\nYou are {persona.name} (@{persona.handle}). {persona.description}",
        f"{STANCE_HEADER}\n{persona.stance}",
    ]
    if assigned:
        points = "\n".join(f"({c.id}) {c.canonical_text}" for c in assigned)
        sections.append(
            f"{TALKING_POINTS_HEADER}\nWork these points into your posts and replies, "
            f"rephrased in your own voice:\n{points}"
        )
    if persona.style_rules:
        rules = "\n".join(
            f"- {STYLE_RULE_TEXT.get(rule, rule)}" for rule in persona.style_rules
        )
        sections.append(f"{STYLE_HEADER}\n{rules}")
    sections.append(f"{FORMAT_HEADER} ({output_format_version}):\n{FORMAT_VERSIONS[output_format_version]}")
    return "\n\n".join(sections)


def extract_talking_points(system_text: str) -> list[tuple[int, str]]:
    """Recover (claim id, canonical text) pairs from an assembled prompt.

    The deterministic mock backend reads its material from the same prompt a
    live model would see, so the two paths stay in sync by construction.
    """
    points = []
    in_section = False
    for line in system_text.splitlines():
        if line.startswith(TALKING_POINTS_HEADER):
            in_section = True
            continue
        if in_section:
            match = _TALKING_POINT_RE.match(line)
            if match:
                points.append((int(match.group(1)), match.group(2)))
            elif line.startswith(("PERSONA:", "STANCE:", "STYLE RULES:", "OUTPUT FORMAT")):
                break
    return points


def build_context(
    memory,
    focus,
    max_messages: int,
    system_text: str = "",
) -> PromptBundle:
    """Assemble the conversation window for one generation call.

    Takes the most recent window entries (oldest first). When the focus is a
    notification with a triggering post, that post is guaranteed to be the
    final message — re-injected if it fell out of the window — so the model
    always sees what it is responding to.
    """
    if max_messages < 1:
        raise ValueError("max_messages must be positive")
    entries = [
        (e.author_handle, e.body, e.post_id) for e in list(memory.conversation_window)[-max_messages:]
    ]

    focus_hint = None
    focus_post = None
    if focus is not None and focus.kind == "notification":
        notification = focus.notification
        focus_post = notification.status
        focus_hint = describe_notification(notification)

    if focus_post is not None:
        entries = [e for e in entries if e[2] != focus_post.id]
        entries.append((focus_post.account.handle, focus_post.content, focus_post.id))

    messages = [
        Message(
            role="agent" if author == memory.own_handle else "other",
            author_handle=author,
            text=body,
        )
        for author, body, _ in entries
    ]
    return PromptBundle(system_text=system_text, messages=messages, focus_hint=focus_hint)


def describe_notification(notification) -> str:
    handle = notification.account.handle
    post_id = notification.status.id if notification.status else None
    if notification.type == "mention" and post_id:
        return f"@{handle} mentioned you in post {post_id}. Address this first."
    if notification.type == "reply" and post_id:
        return f"@{handle} replied to you in post {post_id}. Address this first."
    if notification.type == "favourite" and post_id:
        return f"@{handle} favourited your post {post_id}. Address this first."
    if notification.type == "follow":
        return f"@{handle} followed you. Address this first."
    return f"@{handle} sent you a notification. Address this first."
