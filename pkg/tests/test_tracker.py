"""Report and feature extraction vs independent brute-force log-walk oracles."""

import json
import random

import pytest

from botroom import events as ev
from botroom.claims import load_claims
from botroom.clock import VirtualClock
from botroom.store import SocialStore, UnknownAccount
from botroom.tracker import (
    build_propagation_report,
    extract_detection_features,
    features_from_store,
    report_to_dict,
)

CLAIMS = load_claims()


# ---------------------------------------------------------------------------
# independent oracles: work on raw parsed JSON lines, own matching, own stats
# ---------------------------------------------------------------------------


def oracle_matches(body, claim):
    folded = body.lower().replace("’", "'")
    return all(any(p in folded for p in group) for group in claim.keyword_groups)


def oracle_report(log_lines, claims):
    raw = [json.loads(line) for line in log_lines.splitlines() if line.strip()]
    kinds, posts, fetches = {}, {}, []
    for item in raw:
        data = item["data"]
        if item["event"] == "account_created":
            kinds[data["id"]] = data["kind"]
        elif item["event"] == "post_created":
            posts[data["id"]] = data
        elif item["event"] == "timeline_fetched":
            fetches.append(data)
    out = {}
    matched_any = set()
    for claim in claims:
        carrying = [pid for pid, p in posts.items() if oracle_matches(p["body"], claim)]
        matched_any.update(carrying)
        exposed = set()
        engagements = 0
        for pid in carrying:
            exposed.add(posts[pid]["author"])
            exposed.update(posts[pid]["mentions"])
            for fetch in fetches:
                if pid in fetch["posts"]:
                    exposed.add(fetch["account"])
            for other in posts.values():
                if other["in_reply_to"] == pid:
                    exposed.add(other["author"])
                    if kinds[other["author"]] in ("human", "facilitator"):
                        engagements += 1
        out[claim.id] = (carrying, exposed, engagements)
    off_message = [
        pid for pid, p in posts.items() if kinds[p["author"]] == "bot" and pid not in matched_any
    ]
    return out, off_message


def oracle_features(log_lines, account_id, claims):
    raw = [json.loads(line) for line in log_lines.splitlines() if line.strip()]
    all_posts = {}
    times = []
    for item in raw:
        if item["event"] == "post_created":
            all_posts[item["data"]["id"]] = (item["at"], item["data"])
            if item["data"]["author"] == account_id:
                times.append(item["at"])
    mine = [(at, d) for at, d in all_posts.values() if d["author"] == account_id]
    n = len(mine)
    mean = stdev = None
    if n >= 2:
        gaps = [b - a for a, b in zip(times, times[1:])]
        mean = sum(gaps) / len(gaps)
        stdev = (sum((g - mean) ** 2 for g in gaps) / len(gaps)) ** 0.5
    matched = sum(1 for _, d in mine if any(oracle_matches(d["body"], c) for c in claims))
    replies = [(at, d) for at, d in mine if d["in_reply_to"] is not None]
    latencies = [at - all_posts[d["in_reply_to"]][0] for at, d in replies]
    return {
        "post_count": n,
        "mean_interpost_ms": mean,
        "stdev_interpost_ms": stdev,
        "claim_focus_ratio": (matched / n) if n else 0.0,
        "reply_fraction": (len(replies) / n) if n else 0.0,
        "mean_reply_latency_ms": (sum(latencies) / len(latencies)) if latencies else None,
    }


def synthetic_run(seed, ops=60):
    """Random store activity with claim phrases injected into some posts."""
    rng = random.Random(seed)
    clock = VirtualClock(0)
    store = SocialStore(clock)
    accounts = [
        store.create_account(f"user{i}", f"User {i}", rng.choice(["bot", "bot", "human", "facilitator"]))
        for i in range(rng.randrange(3, 7))
    ]
    now = 0
    for _ in range(ops):
        now += rng.randrange(1, 5000)
        clock.advance_to(now)
        actor = rng.choice(accounts)
        roll = rng.random()
        posts = list(store.posts)
        if roll < 0.55 or not posts:
            pieces = ["just thinking out loud"]
            for claim in rng.sample(CLAIMS, rng.randrange(0, 3)):
                pieces.append(claim.canonical_text)
            if rng.random() < 0.2:
                pieces.append(f"@{rng.choice(accounts).handle}")
            parent = rng.choice(posts) if posts and rng.random() < 0.35 else None
            store.append_post(actor.id, " ".join(pieces)[:500], parent)
        elif roll < 0.75:
            store.home_timeline(actor.id, rng.randrange(1, 40))
        elif roll < 0.85:
            store.favourite_post(actor.id, rng.choice(posts))
        else:
            store.notifications_for(actor.id)
    return store


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def test_single_unfetched_post_exposes_author_only(store, clock):
    author = store.create_account("charlie", "Charlie", "bot")
    store.create_account("paul", "Paul", "human")
    post = store.append_post(author.id, CLAIMS[0].canonical_text)
    report = build_propagation_report(store.log, CLAIMS)
    claim_one = report.claims[0]
    assert claim_one.carrying_posts == [post.id]
    assert claim_one.exposed_accounts == {author.id}
    assert claim_one.reply_engagements == 0


def test_empty_log_report_is_all_zero():
    report = build_propagation_report([], CLAIMS)
    assert [c.claim for c in report.claims] == [1, 2, 3, 4, 5]
    for c in report.claims:
        assert c.carrying_posts == [] and c.exposed_accounts == set() and c.reply_engagements == 0
    assert report.off_message_posts == []


def test_fetch_mention_and_reply_exposure(store, clock):
    bot = store.create_account("charlie", "Charlie", "bot")
    reader = store.create_account("paul", "Paul", "human")
    mentioned = store.create_account("yejin", "Yejin", "human")
    replier = store.create_account("sam", "Sam", "facilitator")
    bystander = store.create_account("richard", "Richard", "human")
    clock.advance_to(10)
    post = store.append_post(bot.id, f"@yejin {CLAIMS[3].canonical_text}")
    clock.advance_to(20)
    store.home_timeline(reader.id, 30)
    clock.advance_to(30)
    store.append_post(replier.id, "that is simply untrue", post.id)
    report = build_propagation_report(store.log, CLAIMS)
    claim_four = next(c for c in report.claims if c.claim == 4)
    assert claim_four.exposed_accounts == {bot.id, reader.id, mentioned.id, replier.id}
    assert bystander.id not in claim_four.exposed_accounts
    assert claim_four.reply_engagements == 1


def test_bot_replies_do_not_count_as_engagement(store, clock):
    bot = store.create_account("charlie", "Charlie", "bot")
    other_bot = store.create_account("nova", "Nova", "bot")
    post = store.append_post(bot.id, CLAIMS[0].canonical_text)
    clock.advance_to(10)
    store.append_post(other_bot.id, "agreed, totally", post.id)
    report = build_propagation_report(store.log, CLAIMS)
    assert report.claims[0].reply_engagements == 0
    assert other_bot.id in report.claims[0].exposed_accounts


def test_off_message_bot_posts_listed(store):
    bot = store.create_account("charlie", "Charlie", "bot")
    human = store.create_account("paul", "Paul", "human")
    untagged = store.append_post(bot.id, "remember paper and scissors? Glue sticks, anyone?")
    store.append_post(bot.id, CLAIMS[0].canonical_text)
    store.append_post(human.id, "humans are never off-message")
    report = build_propagation_report(store.log, CLAIMS)
    assert report.off_message_posts == [untagged.id]
    carrying_all = {pid for c in report.claims for pid in c.carrying_posts}
    assert set(report.off_message_posts) & carrying_all == set()


@pytest.mark.parametrize("seed", range(5))
def test_synthetic_logs_match_oracles(seed):
    store = synthetic_run(seed)
    text = store.dump_log()
    log = ev.load_log(text)
    report = build_propagation_report(log, CLAIMS)
    expected, expected_off = oracle_report(text, CLAIMS)
    for c in report.claims:
        carrying, exposed, engagements = expected[c.claim]
        assert c.carrying_posts == carrying
        assert c.exposed_accounts == exposed
        assert c.reply_engagements == engagements
    assert report.off_message_posts == expected_off

    for account_id in store.accounts:
        features = extract_detection_features(log, account_id, CLAIMS)
        assert features.to_dict() == pytest.approx(oracle_features(text, account_id, CLAIMS))


def test_exposure_monotone_under_log_growth():
    store = synthetic_run(31, ops=40)
    log = store.log
    previous = {c.id: set() for c in CLAIMS}
    for cut in range(0, len(log) + 1, 7):
        prefix = log[:cut]
        report = build_propagation_report(prefix, CLAIMS)
        for c in report.claims:
            assert previous[c.claim] <= c.exposed_accounts
            previous[c.claim] = c.exposed_accounts


def test_corrupt_log_rejected():
    store = synthetic_run(8, ops=10)
    lines = store.dump_log().splitlines()
    with pytest.raises(ev.CorruptLog):
        build_propagation_report(ev.load_log("\n".join(lines[:3])), CLAIMS)  # may orphan refs
        # even if the prefix happens to be closed, a shuffled log must fail
        shuffled = list(reversed(lines))
        build_propagation_report(ev.load_log("\n".join(shuffled)), CLAIMS)


# ---------------------------------------------------------------------------
# detection features
# ---------------------------------------------------------------------------


def test_constant_intervals(store, clock):
    bot = store.create_account("charlie", "Charlie", "bot")
    for t in (0, 60_000, 120_000):
        clock.advance_to(t)
        store.append_post(bot.id, f"post at {t}")
    features = features_from_store(store, bot.id, CLAIMS)
    assert features.post_count == 3
    assert features.mean_interpost_ms == 60_000
    assert features.stdev_interpost_ms == 0
    assert features.reply_fraction == 0.0
    assert features.mean_reply_latency_ms is None


def test_all_posts_matching_gives_focus_ratio_one(store, clock):
    bot = store.create_account("charlie", "Charlie", "bot")
    for i, claim in enumerate(CLAIMS):
        clock.advance_to(i * 1000)
        store.append_post(bot.id, claim.canonical_text)
    features = features_from_store(store, bot.id, CLAIMS)
    assert features.claim_focus_ratio == 1.0


def test_stats_absent_below_two_posts(store):
    bot = store.create_account("charlie", "Charlie", "bot")
    features = features_from_store(store, bot.id, CLAIMS)
    assert features.post_count == 0
    assert features.mean_interpost_ms is None and features.stdev_interpost_ms is None
    assert features.claim_focus_ratio == 0.0 and features.reply_fraction == 0.0
    store.append_post(bot.id, "only one post")
    features = features_from_store(store, bot.id, CLAIMS)
    assert features.post_count == 1
    assert features.mean_interpost_ms is None


def test_reply_latency(store, clock):
    a = store.create_account("charlie", "Charlie", "bot")
    b = store.create_account("paul", "Paul", "human")
    clock.advance_to(1000)
    parent = store.append_post(b.id, "prompting post")
    clock.advance_to(4000)
    store.append_post(a.id, "quick answer", parent.id)
    clock.advance_to(10_000)
    parent2 = store.append_post(b.id, "another prompt")
    clock.advance_to(20_000)
    store.append_post(a.id, "slower answer", parent2.id)
    features = features_from_store(store, a.id, CLAIMS)
    assert features.reply_fraction == 1.0
    assert features.mean_reply_latency_ms == (3000 + 10_000) / 2


def test_unknown_account_rejected(store):
    store.create_account("charlie", "Charlie", "bot")
    with pytest.raises(UnknownAccount):
        features_from_store(store, "a999", CLAIMS)


def test_ratios_always_in_unit_interval():
    for seed in range(3):
        store = synthetic_run(seed + 50, ops=40)
        for account_id in store.accounts:
            f = features_from_store(store, account_id, CLAIMS)
            assert 0.0 <= f.claim_focus_ratio <= 1.0
            assert 0.0 <= f.reply_fraction <= 1.0


def test_report_document_shape(store):
    bot = store.create_account("charlie", "Charlie", "bot")
    store.append_post(bot.id, CLAIMS[0].canonical_text)
    report = build_propagation_report(store.log, CLAIMS)
    document = report_to_dict(report, store, CLAIMS)
    assert set(document) == {"claims", "off_message_posts", "features"}
    assert document["claims"][0]["exposed_accounts"] == [bot.id]  # sorted list, json-safe
    assert "charlie" in document["features"]
    json.dumps(document)  # must be serializable as-is
