"""Offline analysis over a finished run's event log.

Computes, per registered falsehood: which posts carried it, who was exposed
(authored, saw in a fetched timeline, was mentioned in, or replied to a
carrying post), and how many humans engaged. Also extracts per-account
posting-behavior features of the kind a bot detector would look at:
interval regularity, topic focus, reply latency.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Optional

from . import events as ev
from .claims import Claim, tag_post
from .store import SocialStore, UnknownAccount


@dataclass
class ClaimPropagation:
    claim: int
    canonical_text: str
    carrying_posts: list[str]
    exposed_accounts: set[str]
    reply_engagements: int


@dataclass
class PropagationReport:
    claims: list[ClaimPropagation]
    off_message_posts: list[str]


@dataclass
class DetectionFeatures:
    post_count: int
    mean_interpost_ms: Optional[float]
    stdev_interpost_ms: Optional[float]
    claim_focus_ratio: float
    reply_fraction: float
    mean_reply_latency_ms: Optional[float]

    def to_dict(self) -> dict:
        return {
            "post_count": self.post_count,
            "mean_interpost_ms": self.mean_interpost_ms,
            "stdev_interpost_ms": self.stdev_interpost_ms,
            "claim_focus_ratio": self.claim_focus_ratio,
            "reply_fraction": self.reply_fraction,
            "mean_reply_latency_ms": self.mean_reply_latency_ms,
        }


def build_propagation_report(
    log: list[ev.Event],
    claims: Iterable[Claim],
    accounts: Optional[dict] = None,
) -> PropagationReport:
    """Propagation per claim, deterministic given the log.

    Exposure is the strongest proxy the log supports: an account is exposed
    to a claim when it authored, fetched (in a logged timeline page), was
    mentioned in, or replied to a post carrying that claim.
    """
    store = SocialStore.replay(log)  # raises CorruptLog on a bad log
    if accounts is None:
        accounts = store.accounts

    claims = sorted(claims, key=lambda c: c.id)
    posts_in_order = sorted(store.posts.values(), key=lambda p: p.seq)

    carrying: dict[int, list[str]] = {c.id: [] for c in claims}
    matched_posts: set[str] = set()
    for post in posts_in_order:
        for match in tag_post(post, claims):
            carrying[match.claim].append(post.id)
            matched_posts.add(post.id)

    replies_by_parent: dict[str, list] = {}
    for post in posts_in_order:
        if post.in_reply_to is not None:
            replies_by_parent.setdefault(post.in_reply_to, []).append(post)

    fetched_by: dict[str, set[str]] = {}  # post id -> accounts that saw it
    for event in log:
        if event.event == ev.TIMELINE_FETCHED:
            for post_id in event.data["posts"]:
                fetched_by.setdefault(post_id, set()).add(event.data["account"])

    results = []
    for claim in claims:
        post_ids = carrying[claim.id]
        exposed: set[str] = set()
        engagements = 0
        for post_id in post_ids:
            post = store.posts[post_id]
            exposed.add(post.author)
            exposed.update(fetched_by.get(post_id, ()))
            exposed.update(post.mentions)
            for reply in replies_by_parent.get(post_id, ()):
                exposed.add(reply.author)
                if accounts[reply.author].kind in ("human", "facilitator"):
                    engagements += 1
        results.append(
            ClaimPropagation(
                claim=claim.id,
                canonical_text=claim.canonical_text,
                carrying_posts=post_ids,
                exposed_accounts=exposed,
                reply_engagements=engagements,
            )
        )

    off_message = [
        p.id
        for p in posts_in_order
        if accounts[p.author].kind == "bot" and p.id not in matched_posts
    ]
    return PropagationReport(claims=results, off_message_posts=off_message)


def features_from_store(
    store: SocialStore, account_id: str, claims: Iterable[Claim]
) -> DetectionFeatures:
    if account_id not in store.accounts:
        raise UnknownAccount(account_id)
    posts = sorted(
        (p for p in store.posts.values() if p.author == account_id), key=lambda p: p.seq
    )
    n = len(posts)

    mean_interpost = stdev_interpost = None
    if n >= 2:
        intervals = [b.created_at - a.created_at for a, b in zip(posts, posts[1:])]
        mean_interpost = statistics.mean(intervals)
        stdev_interpost = statistics.pstdev(intervals)

    matched = sum(1 for p in posts if tag_post(p, claims))
    replies = [p for p in posts if p.in_reply_to is not None]
    latencies = [p.created_at - store.posts[p.in_reply_to].created_at for p in replies]

    return DetectionFeatures(
        post_count=n,
        mean_interpost_ms=mean_interpost,
        stdev_interpost_ms=stdev_interpost,
        claim_focus_ratio=(matched / n) if n else 0.0,
        reply_fraction=(len(replies) / n) if n else 0.0,
        mean_reply_latency_ms=statistics.mean(latencies) if latencies else None,
    )


def extract_detection_features(
    log: list[ev.Event], account_id: str, claims: Iterable[Claim]
) -> DetectionFeatures:
    """Per-account posting statistics, recomputed from the raw log."""
    return features_from_store(SocialStore.replay(log), account_id, claims)


def report_to_dict(
    report: PropagationReport,
    store: SocialStore,
    claims: Iterable[Claim],
) -> dict:
    """Full report document: claim propagation plus per-handle features."""
    features = {
        account.handle: features_from_store(store, account.id, claims).to_dict()
        for account in sorted(store.accounts.values(), key=lambda a: a.id)
    }
    return {
        "claims": [
            {
                "id": c.claim,
                "canonical_text": c.canonical_text,
                "carrying_posts": c.carrying_posts,
                "exposed_accounts": sorted(c.exposed_accounts),
                "reply_engagements": c.reply_engagements,
            }
            for c in report.claims
        ],
        "off_message_posts": report.off_message_posts,
        "features": features,
    }


def render_report_text(document: dict) -> str:
    lines = []
    lines.append("claim  carrying  exposed  human-replies  text")
    for claim in document["claims"]:
        lines.append(
            f"{claim['id']:>5}  {len(claim['carrying_posts']):>8}  "
            f"{len(claim['exposed_accounts']):>7}  {claim['reply_engagements']:>13}  "
            f"{claim['canonical_text']}"
        )
    lines.append(f"off-message bot posts: {len(document['off_message_posts'])}")
    lines.append("")
    lines.append(
        "account        posts  mean-gap-ms  stdev-gap-ms  claim-focus  reply-frac  reply-latency-ms"
    )
    for handle, f in document["features"].items():
        lines.append(
            f"{handle:<13}  {f['post_count']:>5}  {_num(f['mean_interpost_ms']):>11}  "
            f"{_num(f['stdev_interpost_ms']):>12}  {f['claim_focus_ratio']:>11.2f}  "
            f"{f['reply_fraction']:>10.2f}  {_num(f['mean_reply_latency_ms']):>16}"
        )
    return "\n".join(lines)


def _num(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.0f}"
