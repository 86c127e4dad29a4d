"""Deterministic discrete-event kernel: clock, event queue, resources, and
counter-based random streams.

Determinism contract: pops are ordered by (time, insertion seq), so equal-time
events dispatch in FIFO order; every random draw comes from a stream keyed by
(root seed, stream id, counter), so inserting unrelated events never perturbs
another entity's outcomes.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np


class SimulationError(Exception):
    """An event handler or kernel invariant failed during a run."""


class SchedulingError(SimulationError):
    """Event scheduled in the past or with a non-finite timestamp."""


class ResourceError(SimulationError):
    """Seize/release protocol violation."""


class EventKind(Enum):
    ARRIVAL = "arrival"
    CUT_DONE = "cut_done"
    PICK_DONE = "pick_done"
    FLIP_DONE = "flip_done"
    CHILL_BATCH_DONE = "chill_batch_done"
    EXTRACT_DONE = "extract_done"
    ROUTE_DONE = "route_done"


@dataclass(frozen=True)
class Event:
    time: float
    seq: int
    kind: EventKind
    uid: int
    data: tuple = ()


class EventQueue:
    """Priority queue of events keyed by (time, seq)."""

    def __init__(self):
        self._heap: list[tuple[float, int, Event]] = []

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, event: Event) -> None:
        heapq.heappush(self._heap, (event.time, event.seq, event))

    def pop(self) -> Event:
        return heapq.heappop(self._heap)[2]


class Resource:
    """Capacity-limited resource with a FIFO wait queue and busy-time tally."""

    def __init__(self, name: str, capacity: int):
        if capacity < 1:
            raise ValueError(f"resource {name}: capacity must be >= 1")
        self.name = name
        self.capacity = capacity
        self.holders: set[int] = set()
        self.waiting: deque[int] = deque()
        self._busy_s = 0.0
        self._last_change = 0.0

    @property
    def in_use(self) -> int:
        return len(self.holders)

    def _accumulate(self, now: float) -> None:
        self._busy_s += self.in_use * (now - self._last_change)
        self._last_change = now

    def seize(self, uid: int, now: float) -> bool:
        """Grant immediately if capacity allows, else enqueue FIFO.

        Returns True when granted now.
        """
        if uid in self.holders or uid in self.waiting:
            raise ResourceError(f"{self.name}: {uid} already holds or awaits this resource")
        if self.in_use < self.capacity:
            self._accumulate(now)
            self.holders.add(uid)
            return True
        self.waiting.append(uid)
        return False

    def release(self, uid: int, now: float) -> Optional[int]:
        """Release; returns the uid granted from the wait queue, if any."""
        if uid not in self.holders:
            raise ResourceError(f"{self.name}: release by non-holder {uid}")
        self._accumulate(now)
        self.holders.remove(uid)
        if self.waiting:
            nxt = self.waiting.popleft()
            self._accumulate(now)
            self.holders.add(nxt)
            return nxt
        return None

    def busy_seconds(self, now: float) -> float:
        return self._busy_s + self.in_use * (now - self._last_change)

    def utilization(self, makespan: float) -> float:
        if makespan <= 0:
            return 0.0
        return self.busy_seconds(makespan) / (self.capacity * makespan)


def stream_id_for(replication: int, phone_uid: int, slot: int) -> int:
    """Pack a (replication, phone, slot) triple into one 64-bit stream id.

    Slots 0..63 belong to a phone; phone uid 0 is reserved for station-level
    streams.  The packing keeps streams stable when unrelated entities are
    added or removed.
    """
    if not (0 <= slot < 64):
        raise ValueError("slot must be in [0, 64)")
    return (replication << 40) | (phone_uid << 6) | slot


class RngStream:
    """Counter-based uniform stream, reproducible per (seed, id, counter).

    Backed by the Philox bit generator keyed on (seed, stream id): the same
    triple yields the same value on every platform, and distinct ids give
    statistically independent streams.
    """

    def __init__(self, seed: int, stream_id: int, counter: int = 0):
        self.seed = seed
        self.stream_id = stream_id
        self.counter = 0
        self._gen = np.random.Generator(np.random.Philox(key=[seed, stream_id]))
        for _ in range(counter):
            self.uniform()

    def uniform(self) -> float:
        """One draw from [0, 1); advances the counter by 1."""
        self.counter += 1
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        self.counter += n
        return self._gen.random(n)

    def triangular(self, low: float, mode: float, high: float) -> float:
        """Triangular draw via inverse CDF; consumes exactly one uniform."""
        if not (low <= mode <= high) or low == high:
            raise ValueError("triangular requires low <= mode <= high and low < high")
        u = self.uniform()
        cut = (mode - low) / (high - low)
        if u < cut:
            return low + math.sqrt(u * (high - low) * (mode - low))
        return high - math.sqrt((1.0 - u) * (high - low) * (high - mode))


def draw_uniform(stream: RngStream) -> float:
    return stream.uniform()


class Engine:
    """Single-threaded event loop owning the clock and the queue."""

    def __init__(self):
        self.clock = 0.0
        self._queue = EventQueue()
        self._seq = 0
        self.resources: dict[str, Resource] = {}
        self.trace: Optional[list[tuple]] = None

    def add_resource(self, name: str, capacity: int) -> Resource:
        res = Resource(name, capacity)
        self.resources[name] = res
        return res

    def schedule(self, time: float, kind: EventKind, uid: int, data: tuple = ()) -> Event:
        if not math.isfinite(time):
            raise SchedulingError(f"non-finite event time {time!r}")
        if time < self.clock:
            raise SchedulingError(
                f"cannot schedule {kind.value} at t={time} before clock t={self.clock}")
        event = Event(time, self._seq, kind, uid, data)
        self._seq += 1
        self._queue.push(event)
        return event

    def run(self, handler: Callable[[Event], None],
            station_of: Optional[Callable[[Event], str]] = None) -> float:
        """Dispatch events until the queue drains; returns the makespan."""
        while len(self._queue):
            event = self._queue.pop()
            self.clock = event.time
            if self.trace is not None:
                station = station_of(event) if station_of else ""
                self.trace.append((event.time, event.seq, event.kind.value, event.uid, station))
            try:
                handler(event)
            except SimulationError:
                raise
            except Exception as exc:
                raise SimulationError(
                    f"handler failed on {event.kind.value} seq={event.seq} "
                    f"uid={event.uid} at t={event.time}: {exc}") from exc
        return self.clock
