"""Totally ordered event trace for lockstep and overlap assertions.

Both runtimes (and the simulator) append stage begin/end and message
send/receive events; appends are serialized so concurrent client threads
can share one trace.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

BEGIN = "begin"
END = "end"
SEND = "send"
RECV = "recv"


@dataclass(frozen=True)
class Event:
    t_ms: float
    actor: str  # "client" | "server"
    kind: str  # "begin" | "end" | "send" | "recv"
    name: str  # stage or message name
    frame_id: int


class Trace:
    """Append-only event list; iteration yields events in append order."""

    def __init__(self):
        self._events: list[Event] = []
        self._lock = threading.Lock()

    def add(self, t_ms: float, actor: str, kind: str, name: str, frame_id: int) -> None:
        with self._lock:
            self._events.append(Event(t_ms, actor, kind, name, frame_id))

    def events(self) -> list[Event]:
        with self._lock:
            return list(self._events)

    def __iter__(self):
        return iter(self.events())

    def __len__(self):
        return len(self._events)

    def find(self, actor: str, kind: str, name: str, frame_id: int) -> Event:
        for e in self.events():
            if (e.actor, e.kind, e.name, e.frame_id) == (actor, kind, name, frame_id):
                return e
        raise KeyError(f"no event ({actor}, {kind}, {name}, frame {frame_id})")
