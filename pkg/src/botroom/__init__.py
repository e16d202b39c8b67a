"""Closed-room social-bot testbed.

Bot agents with fictional personas and scripted human facilitators converse
on an embedded micro-blogging server. Every run is captured in an append-only
event log, so falsehood propagation and posting-behavior features can be
recomputed and replayed exactly.
"""

__version__ = "0.1.0"
