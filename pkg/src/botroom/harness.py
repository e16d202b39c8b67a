"""Run orchestration: one time-ordered dispatch queue drives everything.

Scripted mode is fully deterministic: scripted human actions and bot wakes
sit in one queue (ties broken by registration order), the virtual clock jumps
instantly between due items, and a (scenario, seed) pair fixes the event log
byte for byte. Live mode maps the same queue onto wall time and opens the
HTTP server so human participants can join through the web client.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import events as ev
from .agents import Agent, schedule_delay
from .backends import build_backend
from .clock import RealtimeClock, VirtualClock
from .client import ApiFailure, InProcessClient
from .prompts import assemble_system_prompt
from .scenario import Scenario
from .server import ApiServer, HttpFrontend
from .store import SocialStore
from .tracker import build_propagation_report, report_to_dict

POLL_LIMIT = 30


@dataclass
class RunResult:
    event_log_path: Path
    transcript_path: Path
    report_path: Path
    summary: dict


def _derived_seed(run_seed: int, handle: str) -> int:
    digest = hashlib.sha256(f"{run_seed}:{handle}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class _Run:
    def __init__(self, scenario: Scenario, seed: Optional[int], live: bool, warn=print):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.live = live
        self.warn = warn
        self.realtime = live or scenario.clock_mode == "realtime"
        self.clock = RealtimeClock() if self.realtime else VirtualClock(0)
        self.store = SocialStore(self.clock)
        self.api = ApiServer(self.store)
        self.tokens: dict[str, str] = {}
        self.agents: list[Agent] = []
        self.human_clients: dict[str, InProcessClient] = {}
        self.degraded: list[str] = []
        self._queue: list[tuple[int, int, object]] = []
        self._order = 0
        self._setup()

    def _setup(self) -> None:
        scenario = self.scenario
        for human in scenario.humans:
            account = self.store.create_account(human.handle, human.handle.title(), human.kind)
            token = f"t-{human.handle}"
            self.api.sessions.register(token, account.id)
            self.tokens[human.handle] = token
            self.human_clients[human.handle] = InProcessClient(self.api, token)
        for bot in scenario.bots:
            persona = bot.persona
            account = self.store.create_account(persona.handle, persona.name, "bot")
            token = f"t-{persona.handle}"
            self.api.sessions.register(token, account.id)
            self.tokens[persona.handle] = token
            backend_spec = bot.backend
            if backend_spec.kind == "mock" and backend_spec.seed is None:
                backend_spec = type(backend_spec)(
                    kind="mock", seed=_derived_seed(self.seed, persona.handle)
                )
            if backend_spec.kind == "remote" and not self.realtime:
                self.warn(
                    f"warning: bot {persona.handle!r} uses a remote backend in scripted "
                    "mode; the run will not be deterministic"
                )
            agent = Agent(
                persona=persona,
                schedule=bot.schedule,
                backend=build_backend(backend_spec, scenario.base_dir),
                api_client=InProcessClient(self.api, token),
                rng=random.Random(_derived_seed(self.seed, f"rng:{persona.handle}")),
                system_text=assemble_system_prompt(persona, scenario.claims),
            )
            self.agents.append(agent)

        for human in scenario.humans:
            for item in human.script:
                self._push(item.at_ms, ("script", human, item.action))
        for agent in self.agents:
            first_wake = schedule_delay(agent.schedule, agent.rng)
            agent.state.next_wake_at = first_wake
            self._push(first_wake, ("wake", agent))

    def _push(self, at_ms: int, payload) -> None:
        heapq.heappush(self._queue, (at_ms, self._order, payload))
        self._order += 1

    def run_queue(self) -> None:
        duration = self.scenario.duration_ms
        while self._queue:
            at_ms, _, payload = heapq.heappop(self._queue)
            if at_ms >= duration:
                break
            if self.realtime:
                self.clock.sleep_until(at_ms)
            else:
                self.clock.advance_to(at_ms)
            if payload[0] == "script":
                self._run_script_action(payload[1], payload[2])
            else:
                agent = payload[1]
                outcome = agent.step(max(at_ms, self.clock.now_ms()))
                self.degraded.extend(outcome.log)
                self._push(agent.state.next_wake_at, ("wake", agent))
        if self.realtime:
            # The room stays open for the full session even if the queue of
            # scripted work drains early; live humans may still be talking.
            self.clock.sleep_until(duration)

    def _run_script_action(self, human, action: dict) -> None:
        client = self.human_clients[human.handle]
        kind = action["type"]
        try:
            if kind == "post":
                client.post_status(action["body"])
            elif kind == "reply":
                target = self._latest_post_by(client, action["to"])
                if target is None:
                    self.degraded.append(
                        f"[{human.handle}] scripted reply: @{action['to']} has not posted; "
                        "posting without a parent"
                    )
                    client.post_status(action["body"])
                else:
                    client.post_status(action["body"], in_reply_to=target)
            elif kind == "favourite":
                target = self._latest_post_by(client, action["of"])
                if target is None:
                    self.degraded.append(
                        f"[{human.handle}] scripted favourite: @{action['of']} has not posted; skipped"
                    )
                else:
                    client.favourite(target)
            elif kind == "follow":
                account = self.store.account_by_handle(action["target"])
                client.follow(account.id)
        except ApiFailure as exc:
            self.degraded.append(f"[{human.handle}] scripted {kind} failed: {exc}")

    def _latest_post_by(self, client: InProcessClient, handle: str) -> Optional[str]:
        # Humans find reply targets the way anyone would: by reading the room.
        timeline = client.home_timeline(limit=40)
        for status in timeline:  # newest first
            if status.account.handle == handle.lower():
                return status.id
        return None


def run_scenario(
    scenario: Scenario,
    out_dir: Path,
    seed: Optional[int] = None,
    mode: str = "scripted",
    port: Optional[int] = None,
    ui_dir: Optional[Path] = None,
    warn=print,
) -> RunResult:
    """Execute a scenario end to end and write all artifacts into out_dir."""
    started = time.monotonic()
    live = mode == "live"
    run = _Run(scenario, seed, live, warn=warn)

    frontend = None
    if live:
        frontend = HttpFrontend(run.api, port or 8686, ui_dir=ui_dir)
        frontend.start()
        warn(f"listening on port {frontend.port}; session tokens:")
        for handle, token in run.tokens.items():
            warn(f"  @{handle}: {token}")
    try:
        run.run_queue()
    except KeyboardInterrupt:
        warn("interrupted; flushing artifacts")
    finally:
        if frontend is not None:
            frontend.stop()

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / "events.jsonl"
    log_path.write_text(run.store.dump_log())

    log = run.store.log
    transcript_path = out_dir / "transcript.txt"
    transcript_path.write_text(export_transcript(log))

    report = build_propagation_report(log, scenario.claims)
    replayed = SocialStore.replay(log)
    document = report_to_dict(report, replayed, scenario.claims)
    report_path = out_dir / "report.json"
    report_path.write_text(json.dumps(document, indent=2) + "\n")

    kinds = {a.id: a.kind for a in replayed.accounts.values()}
    posts = list(replayed.posts.values())
    bot_posts = sum(1 for p in posts if kinds[p.author] == "bot")
    summary = {
        "posts_total": len(posts),
        "bot_posts": bot_posts,
        "human_posts": len(posts) - bot_posts,
        "per_claim_posts": {str(c.claim): len(c.carrying_posts) for c in report.claims},
        "off_message_posts": len(report.off_message_posts),
        "degraded_events": len(run.degraded),
        "wall_time_s": round(time.monotonic() - started, 3),
    }
    for line in run.degraded:
        warn(f"degraded: {line}")
    return RunResult(
        event_log_path=log_path,
        transcript_path=transcript_path,
        report_path=report_path,
        summary=summary,
    )


def export_transcript(log: list[ev.Event], unblinded: bool = False) -> str:
    """Chronological, human-readable rendering of every post in a log.

    Bot/human identity is deliberately omitted so a reader faces the same
    detection task as a live participant; unblinded=True appends kind labels.
    """
    store = SocialStore.replay(log)
    lines = []
    for post in sorted(store.posts.values(), key=lambda p: p.seq):
        author = store.accounts[post.author]
        minutes, seconds = divmod(post.created_at // 1000, 60)
        body = post.body.replace("\n", " ")
        line = f"[{minutes:02d}:{seconds:02d}] {author.handle}: {body}"
        if post.in_reply_to is not None:
            parent = store.posts[post.in_reply_to]
            line += f" (↩ {store.accounts[parent.author].handle})"
        if unblinded:
            line += f" [{author.kind}]"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def serve_forever(
    scenario: Scenario,
    port: int,
    out_dir: Path,
    seed: Optional[int] = None,
    ui_dir: Optional[Path] = None,
    warn=print,
) -> RunResult:
    """Live mode entry: server plus bots, waiting for human participants."""
    if warn is print:
        warn = lambda msg: print(msg, file=sys.stderr)  # noqa: E731
    return run_scenario(
        scenario, out_dir, seed=seed, mode="live", port=port, ui_dir=ui_dir, warn=warn
    )
