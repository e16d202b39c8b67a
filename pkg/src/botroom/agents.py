"""Bot control loop: a state machine over {inspect, think, act, idle}.

One cycle per wake: poll the room (inspect), pick a focus — oldest
unaddressed notification first, otherwise the timeline — generate a thought
and decision (think), perform at most one action (act), then go idle until
the next jittered wake. A decision of "none" leaves the bot resting in
inspect with no side effects at all.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .actions import ParseError, parse_action
from .backends import BackendFailure, generate
from .client import ApiFailure, InProcessClient, NotificationView, StatusView
from .prompts import build_context

STATES = ("inspect", "think", "act", "idle")
ALLOWED_TRANSITIONS = frozenset(
    {
        ("idle", "inspect"),
        ("inspect", "think"),
        ("think", "act"),
        ("think", "inspect"),
        ("act", "idle"),
    }
)

PERSONA_MIN_WORDS = 60
PERSONA_MAX_WORDS = 140
DEFAULT_WINDOW_CAPACITY = 50
GENERATION_ATTEMPTS = 3  # first try plus two retries


@dataclass
class Persona:
    """A bot's fictional identity; grounds tone, stance, and assigned claims."""

    name: str
    handle: str
    description: str
    style_rules: list[str] = field(default_factory=list)
    stance: str = ""
    claims: list[int] = field(default_factory=list)

    def __post_init__(self):
        words = len(self.description.split())
        if not PERSONA_MIN_WORDS <= words <= PERSONA_MAX_WORDS:
            raise ValueError(
                f"persona {self.handle!r} description is {words} words; "
                f"needs {PERSONA_MIN_WORDS}-{PERSONA_MAX_WORDS}"
            )


@dataclass(frozen=True)
class ScheduleConfig:
    base_interval_ms: int
    jitter_fraction: float = 0.0

    def __post_init__(self):
        if self.base_interval_ms <= 0:
            raise ValueError("base_interval_ms must be positive")
        if not 0.0 <= self.jitter_fraction < 1.0:
            raise ValueError("jitter_fraction must be in [0, 1)")


def schedule_delay(config: ScheduleConfig, rng: random.Random) -> int:
    """Next-wake delay: uniform on [base*(1-j), base*(1+j)], exact base at j=0."""
    if config.jitter_fraction == 0.0:
        return config.base_interval_ms
    low = config.base_interval_ms * (1.0 - config.jitter_fraction)
    high = config.base_interval_ms * (1.0 + config.jitter_fraction)
    return round(rng.uniform(low, high))


@dataclass
class FocusItem:
    kind: str  # "notification" | "timeline"
    notification: Optional[NotificationView] = None
    context_posts: list[StatusView] = field(default_factory=list)


@dataclass(frozen=True)
class Action:
    kind: str  # post | reply | favourite | follow | none
    target: Optional[str] = None
    body: Optional[str] = None


@dataclass
class ThoughtRecord:
    reasoning: str
    decided: Action
    produced_at: int


@dataclass
class AgentState:
    current: str = "idle"
    pending_focus: Optional[FocusItem] = None
    last_action_at: int = 0
    next_wake_at: int = 0


@dataclass
class WindowEntry:
    author_handle: str
    body: str
    post_id: str


class AgentMemory:
    """What one bot remembers: seen posts, handled notifications, conversation."""

    def __init__(self, own_handle: str, capacity: int = DEFAULT_WINDOW_CAPACITY):
        self.own_handle = own_handle
        self.capacity = capacity
        self.seen_post_ids: set[str] = set()
        self.addressed_notification_ids: set[str] = set()
        self.conversation_window: deque[WindowEntry] = deque(maxlen=capacity)


def select_focus(
    notifications: list[NotificationView],
    timeline: list[StatusView],
    memory: AgentMemory,
) -> FocusItem:
    """Oldest unaddressed notification wins; otherwise attend to the timeline.

    Notifications arrive newest-first from the API, so on equal timestamps
    the later list position is the older notification.
    """
    pending = [
        (n, i)
        for i, n in enumerate(notifications)
        if n.id not in memory.addressed_notification_ids
    ]
    if pending:
        oldest = min(pending, key=lambda pair: (pair[0].created_at, -pair[1]))[0]
        return FocusItem(kind="notification", notification=oldest, context_posts=list(timeline))
    return FocusItem(kind="timeline", notification=None, context_posts=list(timeline))


@dataclass
class PerformedAction:
    kind: str
    at: int
    target: Optional[str] = None
    body: Optional[str] = None
    post: Optional[StatusView] = None  # created status for post/reply


def update_memory(
    memory: AgentMemory,
    timeline: list[StatusView],
    action: Optional[PerformedAction] = None,
) -> AgentMemory:
    """Fold newly seen posts (oldest first) and our own action into the window."""
    for status in reversed(timeline):
        if status.id not in memory.seen_post_ids:
            memory.seen_post_ids.add(status.id)
            memory.conversation_window.append(
                WindowEntry(status.account.handle, status.content, status.id)
            )
    if action is not None and action.post is not None:
        memory.seen_post_ids.add(action.post.id)
        memory.conversation_window.append(
            WindowEntry(memory.own_handle, action.post.content, action.post.id)
        )
    return memory


@dataclass
class StepOutcome:
    state: AgentState
    actions: list[PerformedAction]
    log: list[str]
    thought: Optional[ThoughtRecord] = None
    transitions: list[tuple[str, str]] = field(default_factory=list)


def step_agent(
    state: AgentState,
    memory: AgentMemory,
    persona: Persona,
    api_client: InProcessClient,
    backend,
    now_ms: int,
    rng: random.Random,
    *,
    schedule: ScheduleConfig,
    system_text: str,
    poll_limit: int = 30,
    max_messages: int = DEFAULT_WINDOW_CAPACITY,
) -> StepOutcome:
    """Run one full wake cycle. At most one mutating API call happens."""
    log: list[str] = []
    transitions: list[tuple[str, str]] = []
    entry_state = state.current
    entry_focus = state.pending_focus

    def move(to: str) -> None:
        if state.current != to:
            transitions.append((state.current, to))
            state.current = to

    def reschedule() -> None:
        state.next_wake_at = now_ms + schedule_delay(schedule, rng)

    # inspect: poll the room
    move("inspect")
    try:
        timeline = api_client.home_timeline(limit=poll_limit)
        notifications = api_client.notifications(unread_only=True)
    except ApiFailure as exc:
        state.current = entry_state
        state.pending_focus = entry_focus
        transitions.clear()
        reschedule()
        log.append(f"[{persona.handle}] api failure while polling: {exc}")
        return StepOutcome(state, [], log, None, transitions)

    focus = select_focus(notifications, timeline, memory)
    state.pending_focus = focus

    # think: one generation producing thought + decision
    move("think")
    bundle = build_context(memory, focus, max_messages, system_text=system_text)
    envelope = None
    for attempt in range(GENERATION_ATTEMPTS):
        try:
            raw = generate(backend, bundle)
        except BackendFailure as exc:
            log.append(f"[{persona.handle}] backend failure (attempt {attempt + 1}): {exc}")
            continue
        try:
            envelope = parse_action(raw)
            break
        except ParseError as exc:
            log.append(f"[{persona.handle}] unparseable output (attempt {attempt + 1}): {exc}")
    if envelope is None:
        log.append(f"[{persona.handle}] degraded: staying silent this cycle")

    if envelope is None or envelope.action == "none":
        # Nothing to add: back to inspect, no side effects, re-poll next wake.
        thought = ThoughtRecord(
            reasoning=envelope.thought if envelope else "",
            decided=Action(kind="none"),
            produced_at=now_ms,
        )
        move("inspect")
        state.pending_focus = None
        reschedule()
        return StepOutcome(state, [], log, thought, transitions)

    decided = Action(kind=envelope.action, target=envelope.target, body=envelope.body)
    thought = ThoughtRecord(reasoning=envelope.thought, decided=decided, produced_at=now_ms)

    # act: exactly one mutating call
    move("act")
    try:
        performed = _perform(api_client, decided, now_ms)
    except ApiFailure as exc:
        state.current = entry_state
        state.pending_focus = entry_focus
        transitions.clear()
        reschedule()
        log.append(f"[{persona.handle}] api failure while acting: {exc}")
        return StepOutcome(state, [], log, thought, transitions)

    if focus.kind == "notification" and focus.notification is not None:
        memory.addressed_notification_ids.add(focus.notification.id)
    update_memory(memory, timeline, performed)

    move("idle")
    state.pending_focus = None
    state.last_action_at = now_ms
    reschedule()
    return StepOutcome(state, [performed], log, thought, transitions)


def _perform(api_client: InProcessClient, decided: Action, now_ms: int) -> PerformedAction:
    if decided.kind == "post":
        status = api_client.post_status(decided.body)
        return PerformedAction("post", now_ms, body=decided.body, post=status)
    if decided.kind == "reply":
        status = api_client.post_status(decided.body, in_reply_to=decided.target)
        return PerformedAction("reply", now_ms, target=decided.target, body=decided.body, post=status)
    if decided.kind == "favourite":
        api_client.favourite(decided.target)
        return PerformedAction("favourite", now_ms, target=decided.target)
    if decided.kind == "follow":
        api_client.follow(decided.target)
        return PerformedAction("follow", now_ms, target=decided.target)
    raise ValueError(f"unactionable decision: {decided.kind}")


class Agent:
    """One bot: static configuration plus evolving state and memory."""

    def __init__(
        self,
        persona: Persona,
        schedule: ScheduleConfig,
        backend,
        api_client: InProcessClient,
        rng: random.Random,
        system_text: str,
        window_capacity: int = DEFAULT_WINDOW_CAPACITY,
    ):
        self.persona = persona
        self.schedule = schedule
        self.backend = backend
        self.api_client = api_client
        self.rng = rng
        self.system_text = system_text
        self.state = AgentState()
        self.memory = AgentMemory(persona.handle, capacity=window_capacity)

    def step(self, now_ms: int) -> StepOutcome:
        return step_agent(
            self.state,
            self.memory,
            self.persona,
            self.api_client,
            self.backend,
            now_ms,
            self.rng,
            schedule=self.schedule,
            system_text=self.system_text,
        )
