"""Deterministic discrete-event scheduler and named seeded randomness streams."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

SimTime = int

RNG_STREAMS = ("requests", "churn", "planner_tie", "task_duration")


class RngStreams:
    """Independent per-purpose generators derived from one master seed.

    Each stream is seeded from (master_seed, name) so drawing on one stream
    never perturbs another.
    """

    def __init__(self, master_seed: int) -> None:
        self.master_seed = master_seed
        self._streams = {
            name: random.Random(f"{master_seed}:{name}") for name in RNG_STREAMS
        }

    def randint(self, stream: str, lo: int, hi: int) -> int:
        if lo > hi:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return self._streams[stream].randint(lo, hi)

    def choice(self, stream: str, options: Sequence[Any]) -> Any:
        if not options:
            raise ValueError("empty choice set")
        return options[self._streams[stream].randrange(len(options))]

    def random(self, stream: str) -> float:
        return self._streams[stream].random()


@dataclass
class EventHandle:
    fire_at: SimTime
    seq: int
    cancelled: bool = False
    fired: bool = False


@dataclass(order=True)
class _HeapEntry:
    fire_at: SimTime
    seq: int
    target: str = field(compare=False)
    payload: Any = field(compare=False)
    handle: EventHandle = field(compare=False)


def summarize(payload: Any) -> Any:
    """Stable, serializable one-line description of an event payload."""
    if hasattr(payload, "trace_summary"):
        return payload.trace_summary()
    return str(payload)


class Engine:
    """Single-threaded event loop ordered by (fire_at, insertion seq)."""

    def __init__(self) -> None:
        self._now: SimTime = 0
        self._seq = 0
        self._heap: list[_HeapEntry] = []
        self._handlers: dict[str, Callable[[Any], None]] = {}
        self.trace: list[dict] = []
        self.on_undeliverable: Optional[Callable[[str, Any], None]] = None

    def now(self) -> SimTime:
        return self._now

    def register(self, target: str, handler: Callable[[Any], None]) -> None:
        if target in self._handlers:
            raise ValueError(f"handler already bound for {target!r}")
        self._handlers[target] = handler

    def is_registered(self, target: str) -> bool:
        return target in self._handlers

    def schedule(self, at: SimTime, target: str, payload: Any) -> EventHandle:
        if at < self._now:
            raise ValueError(f"cannot schedule at {at} before now={self._now}")
        handle = EventHandle(fire_at=at, seq=self._seq)
        heapq.heappush(self._heap, _HeapEntry(at, self._seq, target, payload, handle))
        self._seq += 1
        return handle

    def cancel(self, handle: EventHandle) -> bool:
        if handle.fired or handle.cancelled:
            return False
        handle.cancelled = True
        return True

    def run_until(self, t: SimTime) -> int:
        if t < self._now:
            raise ValueError(f"cannot run backwards to {t} from now={self._now}")
        delivered = 0
        while self._heap and self._heap[0].fire_at <= t:
            entry = heapq.heappop(self._heap)
            if entry.handle.cancelled:
                continue
            self._now = entry.fire_at
            entry.handle.fired = True
            delivered += 1
            self.trace.append(
                {
                    "t": entry.fire_at,
                    "seq": entry.seq,
                    "target": entry.target,
                    "event": summarize(entry.payload),
                }
            )
            handler = self._handlers.get(entry.target)
            if handler is None:
                if self.on_undeliverable is not None:
                    self.on_undeliverable(entry.target, entry.payload)
            else:
                handler(entry.payload)
        self._now = t
        return delivered
