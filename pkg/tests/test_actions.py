"""Envelope parsing: tolerant extraction, strict validation, round-trip."""

import pytest
from hypothesis import given, strategies as st

from botroom.actions import ActionEnvelope, ParseError, parse_action, serialize_action


def test_clean_none_envelope():
    raw = '{"thought":"quiet day","action":"none","target":null,"body":null}'
    envelope = parse_action(raw)
    assert envelope == ActionEnvelope(thought="quiet day", action="none")


def test_prose_wrapped_reply():
    raw = (
        'sure! {"thought":"x","action":"reply","target":"p1",'
        '"body":"@paul when you show id at a bar, it\'s a one-time check"}'
    )
    envelope = parse_action(raw)
    assert envelope.action == "reply"
    assert envelope.target == "p1"
    assert envelope.body.startswith("@paul when you show id")


def test_trailing_prose_tolerated():
    raw = '{"thought":"t","action":"post","target":null,"body":"hi"} hope that helps!'
    assert parse_action(raw).action == "post"


def test_first_balanced_object_wins_over_brace_noise():
    raw = '{not json} and then {"thought":"t","action":"post","body":"hi"} {"action":"none"}'
    assert parse_action(raw).body == "hi"


def test_nested_braces_inside_strings():
    raw = '{"thought":"looks like {this}","action":"post","target":null,"body":"curly {"}'
    assert parse_action(raw).body == "curly {"


def test_missing_thought_defaults_empty():
    assert parse_action('{"action":"post","body":"hi"}').thought == ""


@pytest.mark.parametrize(
    "raw",
    [
        "no json here at all",
        '{"thought":"x"}',
        '{"action":"teleport","body":"hi"}',
        '{"action":"reply","body":"hi"}',
        '{"action":"favourite"}',
        '{"action":"follow"}',
        '{"action":"post"}',
        '{"action":"post","body":""}',
        '{"action":"post","body":"' + "x" * 501 + '"}',
        '{"action":"none","body":"hi"}',
        '{"action":"none","target":"p1"}',
        '{"action":"post","target":"p1","body":"hi"}',
        '{"action":"favourite","target":"p1","body":"hi"}',
        '{"action":5,"body":"hi"}',
        '{"action":"post","body":7}',
        '{"action":"reply","target":9,"body":"hi"}',
    ],
)
def test_invalid_envelopes_rejected(raw):
    with pytest.raises(ParseError):
        parse_action(raw)


def test_body_at_limit_accepted():
    assert len(parse_action('{"action":"post","body":"' + "x" * 500 + '"}').body) == 500


text = st.text(st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=60)
body_text = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=500)
ident = st.text(st.sampled_from("ap0123456789"), min_size=1, max_size=8)


@st.composite
def envelopes(draw):
    action = draw(st.sampled_from(["post", "reply", "favourite", "follow", "none"]))
    return ActionEnvelope(
        thought=draw(text),
        action=action,
        target=draw(ident) if action in ("reply", "favourite", "follow") else None,
        body=draw(body_text) if action in ("post", "reply") else None,
    )


@given(envelopes())
def test_round_trip(envelope):
    assert parse_action(serialize_action(envelope)) == envelope
