"""Registry of traceable falsehoods and the deterministic post matcher.

A claim matches a post when every one of its keyword groups contributes at
least one phrase found in the body (case-insensitive substring; curly
apostrophes are folded to straight ones first). AND across groups, OR within
a group. The phrase inventory is configuration, not code: it ships as JSON
and is tuned so the known fixture posts tag correctly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional


class UnknownClaim(Exception):
    pass


@dataclass(frozen=True)
class Claim:
    id: int
    canonical_text: str
    keyword_groups: tuple[tuple[str, ...], ...]  # sorted for stable iteration

    def __post_init__(self):
        if not self.keyword_groups:
            raise ValueError(f"claim {self.id} has no keyword groups")
        for group in self.keyword_groups:
            if not group or any(not phrase for phrase in group):
                raise ValueError(f"claim {self.id} has an empty keyword group or phrase")


@dataclass(frozen=True)
class ClaimMatch:
    post: str
    claim: int
    matched_phrases: tuple[str, ...]


def _fold(text: str) -> str:
    return text.lower().replace("’", "'")


def claim_from_dict(raw: dict) -> Claim:
    return Claim(
        id=int(raw["id"]),
        canonical_text=raw["canonical_text"],
        keyword_groups=tuple(
            tuple(sorted(_fold(phrase) for phrase in group)) for group in raw["keyword_groups"]
        ),
    )


def load_claims(path: Optional[Path] = None) -> list[Claim]:
    """Load a claim inventory; with no path, the bundled default."""
    if path is None:
        raw = json.loads(resources.files("botroom.data").joinpath("claims_prop86.json").read_text())
    else:
        raw = json.loads(Path(path).read_text())
    claims = [claim_from_dict(item) for item in raw["claims"]]
    ids = [c.id for c in claims]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate claim ids in inventory")
    return sorted(claims, key=lambda c: c.id)


def claims_by_id(claims: Iterable[Claim]) -> dict[int, Claim]:
    return {c.id: c for c in claims}


def match_body(body: str, claim: Claim) -> Optional[tuple[str, ...]]:
    """Phrases that satisfy every group of the claim, or None if any group fails."""
    folded = _fold(body)
    matched: list[str] = []
    for group in claim.keyword_groups:
        hits = [phrase for phrase in group if phrase in folded]
        if not hits:
            return None
        matched.extend(hits)
    return tuple(matched)


def tag_post(post, claims: Iterable[Claim]) -> list[ClaimMatch]:
    """All claims carried by a post, in claim-id order. Pure and deterministic."""
    matches = []
    for claim in sorted(claims, key=lambda c: c.id):
        phrases = match_body(post.body, claim)
        if phrases is not None:
            matches.append(ClaimMatch(post=post.id, claim=claim.id, matched_phrases=phrases))
    return matches


def tag_body(body: str, claims: Iterable[Claim]) -> list[int]:
    """Claim ids carried by a bare body string (log analysis convenience)."""
    return [
        claim.id
        for claim in sorted(claims, key=lambda c: c.id)
        if match_body(body, claim) is not None
    ]
