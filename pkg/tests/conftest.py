import random

import pytest

from botroom.agents import Persona, ScheduleConfig
from botroom.clock import VirtualClock
from botroom.server import ApiServer
from botroom.store import SocialStore

GENERIC_DESCRIPTION = (
    "A fictional resident of a mid-size college town who spends evenings in "
    "group chats, keeps a dying houseplant alive out of spite, and has strong "
    "opinions about local coffee. They grew up between two small towns, write "
    "long messages with short sentences, and remember everyone's birthdays. "
    "Weekends go to flea markets and amateur photography. They are friendly, "
    "a little stubborn in debates, and quick to share links they have only "
    "half read, then apologize and read them properly afterward."
)


def make_persona(handle="avery", name=None, claims=None, style_rules=None, stance=""):
    return Persona(
        name=name or handle.title(),
        handle=handle,
        description=GENERIC_DESCRIPTION,
        style_rules=style_rules if style_rules is not None else ["lowercase-i"],
        stance=stance or "You oppose Proposition 86 in every post.",
        claims=claims if claims is not None else [],
    )


@pytest.fixture
def clock():
    return VirtualClock(0)


@pytest.fixture
def store(clock):
    return SocialStore(clock)


@pytest.fixture
def api(store):
    return ApiServer(store)


@pytest.fixture
def rng():
    return random.Random(1234)


def default_schedule():
    return ScheduleConfig(base_interval_ms=60_000, jitter_fraction=0.0)
