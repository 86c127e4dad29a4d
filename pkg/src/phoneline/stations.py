"""Process model of the disassembly line, wired into the DES kernel.

Four stations move material:

  cutter    -- one phone at a time; after the cutting cycle it emits the
               model's manifest as face-down stacked components.
  robot     -- picks components one by one; each pick includes the camera
               scan.  Low-value components drop straight into their bin;
               a face-down battery case is flipped before heading to the
               chiller; middle layers go to the chiller as-is.
  chiller   -- freezes adhesive in batches; a partial batch is flushed once
               nothing upstream can feed it any more.
  extractor -- hammer blow splits a chilled battery host into a battery and
               a frame.

Routing decisions act on the *perceived* class, so misclassification can put
a battery-bearing layer into the low-value stream (a logged hazard) or leave
an unflipped case to reach the extractor (also a hazard; the item is diverted
to manual handling).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .config import ScenarioConfig, StationParams
from .engine import Engine, Event, EventKind, RngStream, SimulationError, stream_id_for
from .model import (
    CLASS_INDEX,
    DETECTABLE_CLASSES,
    ComponentClass,
    ComponentItem,
    DomainError,
    Orientation,
    PhoneState,
    PhoneUnit,
    ValueClass,
    manifest_for,
    value_class,
)
from .perception import ConfusionMatrix


class Action(Enum):
    PLACE_LOW_VALUE = "place_low_value"
    FLIP_THEN_CHILL = "flip_then_chill"
    SEND_TO_CHILL = "send_to_chill"


class Bin(Enum):
    LOW_VALUE = "low_value"
    HIGH_VALUE = "high_value"
    BATTERY_SAFE = "battery_safe"
    MANUAL_EXCEPTION = "manual_exception"


def decide_action(perceived: ComponentClass, orientation: Orientation) -> Action:
    """Routing policy for a scanned component (total on detectable classes)."""
    if not perceived.is_detectable:
        raise DomainError(f"{perceived.value} cannot be a perception output")
    if value_class(perceived) is ValueClass.LOW_VALUE:
        return Action.PLACE_LOW_VALUE
    if perceived is ComponentClass.IPHONE_CASE and orientation is Orientation.FACE_DOWN:
        return Action.FLIP_THEN_CHILL
    return Action.SEND_TO_CHILL


def flip(item: ComponentItem) -> ComponentItem:
    """Turn a face-down item face up; flipping twice is a sequencing bug."""
    if item.orientation is not Orientation.FACE_DOWN:
        raise DomainError(f"item {item.uid} is already face up")
    item.orientation = Orientation.FACE_UP
    return item


def build_components(phone: PhoneUnit, uid_base: int) -> list[ComponentItem]:
    """Materialise the cut outcome for a phone: one item per manifest entry,
    all face down, masses split per the model's fractions."""
    model = phone.model
    manifest = manifest_for(model)
    items = []
    for slot, (cls, frac) in enumerate(zip(manifest, model.mass_fractions)):
        items.append(ComponentItem(
            uid=uid_base + slot,
            parent_phone=phone.uid,
            true_class=cls,
            mass_fraction=frac,
            mass_lb=frac * model.mass_lb,
            contains_battery=(model.battery_host is not None and cls is model.battery_host),
        ))
    return items


def expected_hazard_rate(matrix: ConfusionMatrix, host: ComponentClass) -> float:
    """Per-phone probability that the battery host is routed hazardously.

    Derived from the routing policy: any perception that sends the host to
    the low-value bin is a hazard, and a true battery case perceived as a
    middle layer reaches the extractor unflipped (also a hazard).
    """
    row = matrix.matrix[CLASS_INDEX[host]]
    p = 0.0
    for j, perceived in enumerate(DETECTABLE_CLASSES):
        action = decide_action(perceived, Orientation.FACE_DOWN)
        if action is Action.PLACE_LOW_VALUE:
            p += row[j]
        elif (action is Action.SEND_TO_CHILL and host is ComponentClass.IPHONE_CASE
              and perceived is not ComponentClass.IPHONE_CASE):
            p += row[j]  # reaches the hammer face down
    return p


@dataclass
class BinTally:
    """Item counts and masses per output bin; monotone during a run."""

    counts: dict[str, int] = field(default_factory=lambda: {b.value: 0 for b in Bin})
    masses: dict[str, float] = field(default_factory=lambda: {b.value: 0.0 for b in Bin})

    def add(self, bin_: Bin, mass_lb: float) -> None:
        self.counts[bin_.value] += 1
        self.masses[bin_.value] += mass_lb

    @property
    def total_mass(self) -> float:
        return sum(self.masses.values())


@dataclass
class HazardEvent:
    time: float
    uid: int
    description: str


@dataclass
class SimReport:
    """Statistics of one replication; serialises deterministically."""

    seed: int
    replication: int
    phones_done: int
    components_created: int
    outputs_binned: int
    makespan_s: float
    throughput_phph: float
    steady_state_throughput_phph: float
    bottleneck_station: str
    utilization: dict[str, float]
    cycle_s_per_phone: dict[str, float]
    bins: BinTally
    hazards: list[HazardEvent]
    hazard_rate_per_phone: float
    averted_hazards: int
    component_accuracy: float
    phone_success_rate: float
    rescan_count: int
    undetected_count: int
    discrepancy_count: int
    missequenced_count: int
    sorting_time_s: dict[str, dict[str, float]]
    input_mass_lb: float
    binned_mass_lb: float
    metadata: dict[str, float]
    trace: Optional[list[tuple]] = None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "replication": self.replication,
            "phones_done": self.phones_done,
            "components_created": self.components_created,
            "outputs_binned": self.outputs_binned,
            "makespan_s": self.makespan_s,
            "throughput_phph": self.throughput_phph,
            "steady_state_throughput_phph": self.steady_state_throughput_phph,
            "bottleneck_station": self.bottleneck_station,
            "utilization": self.utilization,
            "cycle_s_per_phone": self.cycle_s_per_phone,
            "bins": {"counts": self.bins.counts, "masses_lb": self.bins.masses},
            "hazard_count": len(self.hazards),
            "hazard_rate_per_phone": self.hazard_rate_per_phone,
            "averted_hazards": self.averted_hazards,
            "hazards": [{"time_s": h.time, "uid": h.uid, "description": h.description}
                        for h in self.hazards],
            "component_accuracy": self.component_accuracy,
            "phone_success_rate": self.phone_success_rate,
            "rescan_count": self.rescan_count,
            "undetected_count": self.undetected_count,
            "discrepancy_count": self.discrepancy_count,
            "missequenced_count": self.missequenced_count,
            "sorting_time_s": self.sorting_time_s,
            "input_mass_lb": self.input_mass_lb,
            "binned_mass_lb": self.binned_mass_lb,
            "metadata": self.metadata,
        }


def mix_sequence(scenario: ScenarioConfig) -> list[str]:
    """Deterministic arrival order realising the phone mix exactly.

    Largest-remainder apportionment fixes the per-model counts; the sequence
    then interleaves models by running deficit so the mix stays locally
    balanced (ties break on model id).
    """
    n = scenario.lot_size
    ids = sorted(scenario.phone_mix)
    fracs = {m: scenario.phone_mix[m] for m in ids}
    quota = {m: int(fracs[m] * n) for m in ids}
    short = n - sum(quota.values())
    for m in sorted(ids, key=lambda m: (-(fracs[m] * n - quota[m]), m))[:short]:
        quota[m] += 1
    emitted = {m: 0 for m in ids}
    seq = []
    for k in range(n):
        candidates = [m for m in ids if emitted[m] < quota[m]]
        candidates.sort(key=lambda m: (-(fracs[m] * (k + 1) - emitted[m]), m))
        seq.append(candidates[0])
        emitted[candidates[0]] += 1
    return seq


class LineSimulation:
    """One replication of the line; owns all mutable state."""

    _SLOT_PHONE = 0            # a phone's own stream slot
    _CHILLER_STREAM_PHONE = 0  # phone uid 0 is reserved for station streams
    _SLOT_CHILLER = 1

    def __init__(self, scenario: ScenarioConfig, replication: int = 0,
                 trace: bool = False):
        scenario.validate()
        self.scenario = scenario
        self.replication = replication
        self.params: StationParams = scenario.stations
        self.perception = scenario.perception
        self.matrix = ConfusionMatrix.from_spec(scenario.perception.confusion)

        self.engine = Engine()
        if trace:
            self.engine.trace = []
        self.cutter = self.engine.add_resource("cutter", self.params.cutter_capacity)
        self.robot = self.engine.add_resource("robot", self.params.robot_capacity)
        self.extractor = self.engine.add_resource("extractor", self.params.extractor_capacity)

        self.phones: dict[int, PhoneUnit] = {}
        self.items: dict[int, ComponentItem] = {}
        self.bins = BinTally()
        self.hazards: list[HazardEvent] = []
        self.averted_hazards = 0
        self.rescan_count = 0
        self.undetected_count = 0
        self.discrepancy_count = 0
        self.missequenced_count = 0
        self.components_created = 0
        self.outputs_binned = 0
        self.correct_components = 0
        self.phones_done = 0
        self.phones_unsorted = 0
        self.in_transit_to_chiller = 0

        self.chill_queue: deque[ComponentItem] = deque()
        self.chiller_busy = False
        self.chiller_busy_s = 0.0
        self._streams: dict[int, RngStream] = {}
        self._awaiting_sort: dict[int, list[ComponentItem]] = {}
        # phones currently being sorted: uid -> (pick plan, next index)
        self._sort_state: dict[int, tuple[list[ComponentItem], int]] = {}

    # -- random streams ----------------------------------------------------

    def _stream(self, phone_uid: int, slot: int) -> RngStream:
        sid = stream_id_for(self.replication, phone_uid, slot)
        st = self._streams.get(sid)
        if st is None:
            st = RngStream(self.scenario.seed, sid)
            self._streams[sid] = st
        return st

    def _item_stream(self, item: ComponentItem) -> RngStream:
        slot = (item.uid - item.parent_phone * 64) + 1  # slot 0 is the phone itself
        return self._stream(item.parent_phone, slot)

    def _duration(self, name: str, stream: RngStream) -> float:
        tri = self.params.triangular.get(name)
        if tri is not None:
            return stream.triangular(*tri)
        return float(getattr(self.params, name))

    # -- lifecycle ---------------------------------------------------------

    def run(self) -> SimReport:
        order = mix_sequence(self.scenario)
        self.phones_unsorted = len(order)
        for k, model_id in enumerate(order):
            uid = k + 1
            phone = PhoneUnit(uid=uid, model=self.scenario.model(model_id), arrival_time=0.0)
            self.phones[uid] = phone
            self.engine.schedule(0.0, EventKind.ARRIVAL, uid)
        makespan = self.engine.run(self._handle, station_of=_station_of)
        return self._build_report(makespan)

    # -- event dispatch ----------------------------------------------------

    def _handle(self, ev: Event) -> None:
        if ev.kind is EventKind.ARRIVAL:
            self._on_arrival(ev)
        elif ev.kind is EventKind.CUT_DONE:
            self._on_cut_done(ev)
        elif ev.kind is EventKind.PICK_DONE:
            self._on_pick_done(ev)
        elif ev.kind is EventKind.FLIP_DONE:
            self._on_flip_done(ev)
        elif ev.kind is EventKind.ROUTE_DONE:
            self._on_route_done(ev)
        elif ev.kind is EventKind.CHILL_BATCH_DONE:
            self._on_chill_batch_done(ev)
        elif ev.kind is EventKind.EXTRACT_DONE:
            self._on_extract_done(ev)
        else:  # pragma: no cover
            raise SimulationError(f"unhandled event kind {ev.kind}")

    # -- cutting -----------------------------------------------------------

    def _on_arrival(self, ev: Event) -> None:
        if self.cutter.seize(ev.uid, self.engine.clock):
            self._start_cut(self.phones[ev.uid])

    def _start_cut(self, phone: PhoneUnit) -> None:
        duration = self._duration("cutting_cycle", self._stream(phone.uid, self._SLOT_PHONE))
        self.engine.schedule(self.engine.clock + duration, EventKind.CUT_DONE, phone.uid)

    def _on_cut_done(self, ev: Event) -> None:
        phone = self.phones[ev.uid]
        items = build_components(phone, uid_base=phone.uid * 64)
        if not items:
            raise SimulationError(f"phone {phone.uid}: empty manifest")
        for item in items:
            self.items[item.uid] = item
        self.components_created += len(items)
        phone.state = PhoneState.CUT
        phone.pending_items = len(items)
        nxt = self.cutter.release(ev.uid, self.engine.clock)
        if nxt is not None:
            self._start_cut(self.phones[nxt])
        if self.robot.seize(phone.uid, self.engine.clock):
            self._start_sorting(phone, items)
        else:
            self._awaiting_sort[phone.uid] = items

    # -- sorting -----------------------------------------------------------

    def _start_sorting(self, phone: PhoneUnit, items: list[ComponentItem]) -> None:
        phone.state = PhoneState.SORTING
        phone.sort_start = self.engine.clock
        self._sort_state[phone.uid] = (items, 0)
        self._schedule_pick(items[0], attempt=0)

    def _schedule_pick(self, item: ComponentItem, attempt: int) -> None:
        duration = self._duration("pick_time", self._item_stream(item))
        self.engine.schedule(self.engine.clock + duration, EventKind.PICK_DONE,
                             item.uid, data=(attempt,))

    def _on_pick_done(self, ev: Event) -> None:
        item = self.items[ev.uid]
        attempt = ev.data[0]
        stream = self._item_stream(item)
        # one scan = one class draw + one detection-confidence draw
        perceived = self.matrix.sample(item.true_class, stream)
        u_detect = stream.uniform()
        if u_detect < self.perception.subthreshold_prob:
            if attempt == 0:
                self.rescan_count += 1
                self._schedule_pick(item, attempt=1)
                return
            self.undetected_count += 1
            self._deposit(Bin.MANUAL_EXCEPTION, item.mass_lb)
            self._finish_item(item)
            self._advance_sorting(item.parent_phone)
            return
        item.perceived_class = perceived
        item.confidence = self.perception.detected_confidence
        item.rescans = attempt
        if perceived is item.true_class:
            self.correct_components += 1
            self.phones[item.parent_phone].correct_components += 1
        action = decide_action(perceived, item.orientation)
        if action is Action.PLACE_LOW_VALUE:
            self._route_low_value(item)
            self._advance_sorting(item.parent_phone)
        elif action is Action.FLIP_THEN_CHILL:
            duration = self._duration("flip_time", stream)
            self.engine.schedule(self.engine.clock + duration, EventKind.FLIP_DONE, item.uid)
        else:  # SEND_TO_CHILL
            self._send_to_chiller(item)
            self._advance_sorting(item.parent_phone)

    def _on_flip_done(self, ev: Event) -> None:
        item = self.items[ev.uid]
        flip(item)
        self._send_to_chiller(item)
        self._advance_sorting(item.parent_phone)

    def _advance_sorting(self, phone_uid: int) -> None:
        phone = self.phones[phone_uid]
        plan, index = self._sort_state[phone_uid]
        index += 1
        if index < len(plan):
            self._sort_state[phone_uid] = (plan, index)
            self._schedule_pick(plan[index], attempt=0)
            return
        del self._sort_state[phone_uid]
        phone.sort_end = self.engine.clock
        if phone.pending_items:
            phone.state = PhoneState.CHILLING
        self.phones_unsorted -= 1
        self._check_phone_done(phone)
        nxt = self.robot.release(phone.uid, self.engine.clock)
        self._maybe_start_chill()
        if nxt is not None:
            self._start_sorting(self.phones[nxt], self._awaiting_sort.pop(nxt))

    # -- routing -----------------------------------------------------------

    def _route_low_value(self, item: ComponentItem) -> None:
        if item.contains_battery:
            self._log_hazard(item, "battery-bearing layer routed to the low-value bin")
            if self.perception.xray_audit:
                self.averted_hazards += 1
                self._deposit(Bin.MANUAL_EXCEPTION, item.mass_lb)
                self._finish_item(item)
                return
        self._deposit(Bin.LOW_VALUE, item.mass_lb)
        self._finish_item(item)

    def _send_to_chiller(self, item: ComponentItem) -> None:
        transfer = self.params.transfer_time
        if transfer > 0:
            self.in_transit_to_chiller += 1
            self.engine.schedule(self.engine.clock + transfer, EventKind.ROUTE_DONE, item.uid)
        else:
            self.chill_queue.append(item)
            self._maybe_start_chill()

    def _on_route_done(self, ev: Event) -> None:
        self.in_transit_to_chiller -= 1
        self.chill_queue.append(self.items[ev.uid])
        self._maybe_start_chill()

    # -- chilling ----------------------------------------------------------

    def _upstream_active(self) -> bool:
        return self.phones_unsorted > 0 or self.in_transit_to_chiller > 0

    def _maybe_start_chill(self) -> None:
        if self.chiller_busy or not self.chill_queue:
            return
        cap = self.params.chill_batch_capacity
        if len(self.chill_queue) < cap and self._upstream_active():
            return  # wait for a full batch while more work can still arrive
        size = min(cap, len(self.chill_queue))
        batch = tuple(self.chill_queue.popleft() for _ in range(size))
        self.chiller_busy = True
        duration = self._duration(
            "chill_time", self._stream(self._CHILLER_STREAM_PHONE, self._SLOT_CHILLER))
        self.chiller_busy_s += duration
        self.engine.schedule(self.engine.clock + duration, EventKind.CHILL_BATCH_DONE,
                             batch[0].uid, data=tuple(i.uid for i in batch))

    def _on_chill_batch_done(self, ev: Event) -> None:
        for uid in ev.data:
            item = self.items[uid]
            item.chilled = True
            if self.extractor.seize(uid, self.engine.clock):
                self._start_extract(item)
        self.chiller_busy = False
        self._maybe_start_chill()

    # -- extraction --------------------------------------------------------

    def _start_extract(self, item: ComponentItem) -> None:
        duration = self._duration("extract_time", self._item_stream(item))
        self.engine.schedule(self.engine.clock + duration, EventKind.EXTRACT_DONE, item.uid)

    def _on_extract_done(self, ev: Event) -> None:
        item = self.items[ev.uid]
        nxt = self.extractor.release(ev.uid, self.engine.clock)
        phone = self.phones[item.parent_phone]
        if phone.state is PhoneState.CHILLING:
            phone.state = PhoneState.EXTRACTED
        if (item.true_class is ComponentClass.IPHONE_CASE
                and item.orientation is Orientation.FACE_DOWN):
            # mis-sequenced: the case reached the hammer without flipping
            self.missequenced_count += 1
            if item.contains_battery:
                self._log_hazard(item, "extraction attempted on a face-down battery case")
            self._deposit(Bin.MANUAL_EXCEPTION, item.mass_lb)
        elif item.contains_battery:
            battery_mass = self.params.battery_mass_fraction * item.mass_lb
            self._deposit(Bin.BATTERY_SAFE, battery_mass)
            self._deposit(Bin.HIGH_VALUE, item.mass_lb - battery_mass)
        else:
            # a misclassified battery-less layer went through the cold path
            self.discrepancy_count += 1
            self._deposit(Bin.HIGH_VALUE, item.mass_lb)
        self._finish_item(item)
        if nxt is not None:
            self._start_extract(self.items[nxt])

    # -- bookkeeping ---------------------------------------------------------

    def _deposit(self, bin_: Bin, mass_lb: float) -> None:
        self.bins.add(bin_, mass_lb)
        self.outputs_binned += 1

    def _finish_item(self, item: ComponentItem) -> None:
        phone = self.phones[item.parent_phone]
        phone.pending_items -= 1
        self._check_phone_done(phone)

    def _check_phone_done(self, phone: PhoneUnit) -> None:
        if (phone.pending_items == 0 and phone.sort_end >= 0
                and phone.state is not PhoneState.DONE):
            phone.state = PhoneState.DONE
            phone.done_time = self.engine.clock
            self.phones_done += 1

    def _log_hazard(self, item: ComponentItem, description: str) -> None:
        self.hazards.append(HazardEvent(self.engine.clock, item.uid, description))

    # -- report ------------------------------------------------------------

    def _build_report(self, makespan: float) -> SimReport:
        n = self.phones_done
        if n != len(self.phones):
            raise SimulationError(
                f"drained queue left {len(self.phones) - n} phone(s) unfinished")
        util = {
            "cutter": self.cutter.utilization(makespan),
            "robot": self.robot.utilization(makespan),
            "chiller": (self.chiller_busy_s / makespan) if makespan > 0 else 0.0,
            "extractor": self.extractor.utilization(makespan),
        }
        # effective cycle per phone: busy seconds normalised by parallelism
        effective = {
            "cutter": self.cutter.busy_seconds(makespan) / self.cutter.capacity,
            "robot": self.robot.busy_seconds(makespan) / self.robot.capacity,
            "chiller": self.chiller_busy_s,  # one chamber; batching is internal
            "extractor": self.extractor.busy_seconds(makespan) / self.extractor.capacity,
        }
        per_phone = {k: (v / n if n else 0.0) for k, v in effective.items()}
        if n and max(per_phone.values()) > 0:
            bottleneck = max(sorted(per_phone), key=lambda k: per_phone[k])
            steady = 3600.0 / per_phone[bottleneck]
        else:
            bottleneck = ""
            steady = 0.0
        sorting: dict[str, list[float]] = {}
        for phone in self.phones.values():
            if phone.sort_start >= 0 and phone.sort_end >= 0:
                sorting.setdefault(phone.model.family.value, []).append(
                    phone.sort_end - phone.sort_start)
        sorting_stats = {
            fam: {"mean": float(np.mean(vals)), "max": float(np.max(vals)),
                  "count": len(vals)}
            for fam, vals in sorted(sorting.items())
        }
        total_components = self.components_created
        phones_all_correct = sum(
            1 for p in self.phones.values()
            if p.correct_components == len(p.model.manifest))
        input_mass = sum(p.model.mass_lb for p in self.phones.values())
        return SimReport(
            seed=self.scenario.seed,
            replication=self.replication,
            phones_done=n,
            components_created=total_components,
            outputs_binned=self.outputs_binned,
            makespan_s=makespan,
            throughput_phph=(n * 3600.0 / makespan) if makespan > 0 else 0.0,
            steady_state_throughput_phph=steady,
            bottleneck_station=bottleneck,
            utilization=util,
            cycle_s_per_phone=per_phone,
            bins=self.bins,
            hazards=self.hazards,
            hazard_rate_per_phone=(len(self.hazards) / n) if n else 0.0,
            averted_hazards=self.averted_hazards,
            component_accuracy=(self.correct_components / total_components)
                               if total_components else 0.0,
            phone_success_rate=(phones_all_correct / len(self.phones))
                               if self.phones else 0.0,
            rescan_count=self.rescan_count,
            undetected_count=self.undetected_count,
            discrepancy_count=self.discrepancy_count,
            missequenced_count=self.missequenced_count,
            sorting_time_s=sorting_stats,
            input_mass_lb=input_mass,
            binned_mass_lb=self.bins.total_mass,
            metadata={
                "inference_time_ms": self.params.inference_time_ms,
                "chiller_air_temp_c": self.params.chiller_air_temp_c,
                "chiller_airflow_scfm": self.params.chiller_airflow_scfm,
            },
            trace=self.engine.trace,
        )


_STATIONS = {
    EventKind.ARRIVAL: "collection",
    EventKind.CUT_DONE: "cutter",
    EventKind.PICK_DONE: "robot",
    EventKind.FLIP_DONE: "robot",
    EventKind.ROUTE_DONE: "conveyor",
    EventKind.CHILL_BATCH_DONE: "chiller",
    EventKind.EXTRACT_DONE: "extractor",
}


def _station_of(ev: Event) -> str:
    return _STATIONS.get(ev.kind, "")


def run_simulation(scenario: ScenarioConfig, replication: int = 0,
                   trace: bool = False) -> SimReport:
    """Run one replication to completion and return its report."""
    return LineSimulation(scenario, replication=replication, trace=trace).run()


def run_replications(scenario: ScenarioConfig, replications: Optional[int] = None
                     ) -> tuple[list[SimReport], dict]:
    """Run N independent replications plus an order-independent aggregate."""
    n = scenario.replications if replications is None else replications
    reports = [run_simulation(scenario, replication=r) for r in range(n)]
    return reports, aggregate_reports(reports)


def aggregate_reports(reports: list[SimReport]) -> dict:
    def stats(values):
        arr = np.asarray(values, dtype=float)
        return {
            "mean": float(arr.mean()) if arr.size else 0.0,
            "stddev": float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
            "min": float(arr.min()) if arr.size else 0.0,
            "max": float(arr.max()) if arr.size else 0.0,
        }

    return {
        "replications": len(reports),
        "throughput_phph": stats([r.throughput_phph for r in reports]),
        "steady_state_throughput_phph": stats([r.steady_state_throughput_phph for r in reports]),
        "hazard_rate_per_phone": stats([r.hazard_rate_per_phone for r in reports]),
        "phone_success_rate": stats([r.phone_success_rate for r in reports]),
        "component_accuracy": stats([r.component_accuracy for r in reports]),
    }
