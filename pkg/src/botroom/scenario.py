"""Run configuration: who is in the room, what they believe, when they speak.

A scenario file is a single JSON document holding the proposition text, the
claim inventory, bot personas with their backends and posting cadence, and
scripted human participants. Paths inside a scenario (replay scripts) are
relative to the scenario file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .agents import Persona, ScheduleConfig
from .backends import BackendSpec
from .claims import Claim, claim_from_dict

SCRIPT_ACTION_TYPES = ("post", "reply", "favourite", "follow")
HUMAN_KINDS = ("human", "facilitator")
CLOCK_MODES = ("virtual", "realtime")

DEFAULT_BASE_INTERVAL_MS = 120_000
DEFAULT_JITTER_FRACTION = 0.3


class ScenarioInvalid(Exception):
    pass


@dataclass
class ScriptAction:
    at_ms: int
    action: dict


@dataclass
class BotSetup:
    persona: Persona
    backend: BackendSpec
    schedule: ScheduleConfig


@dataclass
class HumanSetup:
    handle: str
    kind: str
    script: list[ScriptAction] = field(default_factory=list)


@dataclass
class Scenario:
    name: str
    proposition_text: str
    claims: list[Claim]
    bots: list[BotSetup]
    humans: list[HumanSetup]
    duration_ms: int
    seed: int
    clock_mode: str
    base_dir: Path


def default_scenario_path() -> Path:
    return Path(str(resources.files("botroom.data").joinpath("scenario_prop86.json")))


def load_scenario(path: Optional[Path] = None) -> Scenario:
    """Parse and validate a scenario file; without a path, the bundled one."""
    scenario_path = Path(path) if path is not None else default_scenario_path()
    if not scenario_path.is_file():
        raise ScenarioInvalid(f"scenario file not found: {scenario_path}")
    try:
        raw = json.loads(scenario_path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioInvalid(f"scenario is not valid JSON: {exc}") from exc
    return parse_scenario(raw, base_dir=scenario_path.parent)


def parse_scenario(raw: dict, base_dir: Path) -> Scenario:
    try:
        claims = [claim_from_dict(c) for c in raw.get("claims", [])]
        claim_ids = {c.id for c in claims}
        if len(claim_ids) != len(claims):
            raise ScenarioInvalid("duplicate claim ids")

        bots = [_parse_bot(b, base_dir) for b in raw.get("bots", [])]
        humans = [_parse_human(h) for h in raw.get("humans", [])]

        duration_ms = int(raw["duration_ms"])
        if duration_ms <= 0:
            raise ScenarioInvalid("duration_ms must be positive")
        clock_mode = raw.get("clock_mode", "virtual")
        if clock_mode not in CLOCK_MODES:
            raise ScenarioInvalid(f"unknown clock_mode: {clock_mode!r}")

        scenario = Scenario(
            name=str(raw.get("name", "unnamed")),
            proposition_text=raw.get("proposition_text", ""),
            claims=claims,
            bots=bots,
            humans=humans,
            duration_ms=duration_ms,
            seed=int(raw.get("seed", 0)),
            clock_mode=clock_mode,
            base_dir=base_dir,
        )
    except ScenarioInvalid:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioInvalid(f"malformed scenario: {exc}") from exc

    _validate(scenario)
    return scenario


def _parse_bot(raw: dict, base_dir: Path) -> BotSetup:
    persona_raw = raw["persona"]
    if isinstance(persona_raw, str):
        # persona stored as its own JSON document, relative to the scenario
        persona_path = base_dir / persona_raw
        if not persona_path.is_file():
            raise ScenarioInvalid(f"persona file not found: {persona_path}")
        persona_raw = json.loads(persona_path.read_text())
    persona_raw = dict(persona_raw)
    base_interval = raw.get(
        "base_interval_ms", persona_raw.pop("base_interval_ms", DEFAULT_BASE_INTERVAL_MS)
    )
    jitter = raw.get(
        "jitter_fraction", persona_raw.pop("jitter_fraction", DEFAULT_JITTER_FRACTION)
    )
    persona = Persona(
        name=persona_raw["name"],
        handle=persona_raw["handle"],
        description=persona_raw["description"],
        style_rules=list(persona_raw.get("style_rules", [])),
        stance=persona_raw.get("stance", ""),
        claims=[int(c) for c in persona_raw.get("claims", [])],
    )
    backend_raw = dict(raw.get("backend", {"kind": "mock"}))
    backend = BackendSpec(
        kind=backend_raw.get("kind", "mock"),
        seed=backend_raw.get("seed"),
        script_path=backend_raw.get("script_path"),
        endpoint=backend_raw.get("endpoint"),
        model=backend_raw.get("model"),
        api_key_env=backend_raw.get("api_key_env"),
        temperature=float(backend_raw.get("temperature", 1.0)),
        timeout_ms=int(backend_raw.get("timeout_ms", 30_000)),
    )
    schedule = ScheduleConfig(base_interval_ms=int(base_interval), jitter_fraction=float(jitter))
    return BotSetup(persona=persona, backend=backend, schedule=schedule)


def _parse_human(raw: dict) -> HumanSetup:
    kind = raw.get("kind", "human")
    if kind not in HUMAN_KINDS:
        raise ScenarioInvalid(f"unknown human kind: {kind!r}")
    script = [
        ScriptAction(at_ms=int(item["at_ms"]), action=dict(item["action"]))
        for item in raw.get("script", [])
    ]
    return HumanSetup(handle=raw["handle"], kind=kind, script=script)


def _validate(scenario: Scenario) -> None:
    handles = [b.persona.handle for b in scenario.bots] + [h.handle for h in scenario.humans]
    seen = set()
    for handle in handles:
        if handle in seen:
            raise ScenarioInvalid(f"duplicate handle: {handle!r}")
        seen.add(handle)

    claim_ids = {c.id for c in scenario.claims}
    for bot in scenario.bots:
        unknown = [c for c in bot.persona.claims if c not in claim_ids]
        if unknown:
            raise ScenarioInvalid(
                f"bot {bot.persona.handle!r} references unknown claims: {unknown}"
            )

    for human in scenario.humans:
        previous = None
        for item in human.script:
            if previous is not None and item.at_ms < previous:
                raise ScenarioInvalid(f"script for {human.handle!r} is not sorted by at_ms")
            previous = item.at_ms
            action_type = item.action.get("type")
            if action_type not in SCRIPT_ACTION_TYPES:
                raise ScenarioInvalid(
                    f"script for {human.handle!r} has unknown action type: {action_type!r}"
                )
            if action_type in ("post", "reply") and not item.action.get("body"):
                raise ScenarioInvalid(f"script for {human.handle!r}: {action_type} needs a body")
            if action_type == "reply" and not item.action.get("to"):
                raise ScenarioInvalid(f"script for {human.handle!r}: reply needs a 'to' handle")
            if action_type == "favourite" and not item.action.get("of"):
                raise ScenarioInvalid(f"script for {human.handle!r}: favourite needs an 'of' handle")
            if action_type == "follow" and not item.action.get("target"):
                raise ScenarioInvalid(f"script for {human.handle!r}: follow needs a 'target' handle")
