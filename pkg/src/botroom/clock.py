"""Clocks for run orchestration.

All timestamps in the system are integer milliseconds owned by the harness.
The virtual clock jumps instantly between due items, which is what lets a
20-minute session execute in well under a second; the realtime clock maps the
same schedule onto wall time for live runs with human participants.
"""

from __future__ import annotations

import time


class VirtualClock:
    """Logical time. Advances only when told to, never backwards."""

    def __init__(self, start_ms: int = 0):
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def advance_to(self, at_ms: int) -> None:
        if at_ms > self._now_ms:
            self._now_ms = at_ms


class RealtimeClock:
    """Wall-clock time, rebased so the run starts at 0 ms."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def sleep_until(self, at_ms: int) -> None:
        remaining = at_ms - self.now_ms()
        if remaining > 0:
            time.sleep(remaining / 1000.0)
