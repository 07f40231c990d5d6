"""Performance measurements folded from lifecycle and state-transition records."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

from .domain import RequestStatus, RobotState


@dataclass
class TickSample:
    tick: int
    arrived: int
    processed: int
    successful: int
    failed: int
    unprocessed: int
    latency: Optional[float]
    efficiency: Optional[float]

    def to_doc(self) -> dict:
        return {
            "tick": self.tick,
            "arrived": self.arrived,
            "processed": self.processed,
            "successful": self.successful,
            "failed": self.failed,
            "unprocessed": self.unprocessed,
            "latency": self.latency,
            "efficiency": self.efficiency,
        }


@dataclass
class RobotTimeLedger:
    controlled: int = 0
    uncontrolled: int = 0
    unregistered: int = 0

    @property
    def registered(self) -> int:
        return self.controlled + self.uncontrolled

    @property
    def overall(self) -> int:
        return self.registered + self.unregistered

    def accrue(self, state: RobotState, dt: int) -> None:
        if dt < 0:
            raise ValueError("negative interval")
        if state is RobotState.CONTROLLED:
            self.controlled += dt
        elif state is RobotState.IDLE:
            self.uncontrolled += dt
        else:
            self.unregistered += dt

    def to_doc(self) -> dict:
        return {
            "controlled": self.controlled,
            "uncontrolled": self.uncontrolled,
            "unregistered": self.unregistered,
            "registered": self.registered,
            "overall": self.overall,
        }


def robot_kpis(ledger: RobotTimeLedger) -> tuple[float, float, Optional[float]]:
    """(availability, utilization, effectiveness) = (T_r/T_ov, T_c/T_ov, T_c/T_unc)."""
    if ledger.overall <= 0:
        raise ValueError("overall time must be positive")
    availability = ledger.registered / ledger.overall
    utilization = ledger.controlled / ledger.overall
    effectiveness = (
        ledger.controlled / ledger.uncontrolled if ledger.uncontrolled > 0 else None
    )
    return availability, utilization, effectiveness


def request_latency(arrival_time: int, start_time: int) -> int:
    """Time from arrival to the start of processing."""
    return start_time - arrival_time


def tick_rates(arrived: int, successful: int, failed: int) -> tuple[Optional[float], Optional[float]]:
    """Per-tick (success_rate, failure_rate) over arrivals; null with no arrivals."""
    if arrived == 0:
        return None, None
    return successful / arrived, failed / arrived


def cumulative_efficiency(cum_success: int, cum_fail: int) -> Optional[float]:
    if cum_fail == 0:
        return None
    return cum_success / cum_fail


@dataclass
class RequestRecord:
    id: str
    arrival: int
    start: Optional[int] = None
    end: Optional[int] = None
    status: RequestStatus = RequestStatus.QUEUED
    reason: Optional[str] = None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "arrival": self.arrival,
            "start": self.start,
            "end": self.end,
            "status": self.status.value,
            "reason": self.reason,
        }


@dataclass
class Transition:
    robot_id: str
    from_state: Optional[RobotState]
    to_state: RobotState
    at: int

    def to_doc(self) -> dict:
        return {
            "robot_id": self.robot_id,
            "from": self.from_state.value if self.from_state else None,
            "to": self.to_state.value,
            "at": self.at,
        }


class MetricsCollector:
    """Single-writer sink for lifecycle, transition, and planning records.

    All derived series are pure folds over the recorded streams, so they can
    be recomputed at any point and always agree with the raw log.
    """

    def __init__(self) -> None:
        self.requests: dict[str, RequestRecord] = {}
        self.transitions: list[Transition] = []
        self.planning: list[dict] = []

    # -- record intake -----------------------------------------------------

    def on_arrival(self, request_id: str, at: int) -> None:
        self.requests[request_id] = RequestRecord(id=request_id, arrival=at)

    def on_start(self, request_id: str, at: int) -> None:
        self.requests[request_id].start = at

    def on_terminal(self, request_id: str, at: int, status: RequestStatus, reason: Optional[str]) -> None:
        rec = self.requests[request_id]
        rec.end = at
        rec.status = status
        rec.reason = reason

    def on_transition(
        self, robot_id: str, from_state: Optional[RobotState], to_state: RobotState, at: int
    ) -> None:
        self.transitions.append(Transition(robot_id, from_state, to_state, at))

    def on_planning(self, request_id: str, outcome: str, reason, assignments) -> None:
        self.planning.append(
            {
                "request_id": request_id,
                "outcome": outcome,
                "reason": reason,
                "assignments": assignments,
            }
        )

    # -- derived series ----------------------------------------------------

    def tick_series(self, duration: int, units_per_tick: int = 1) -> list[TickSample]:
        n_ticks = max(1, -(-duration // units_per_tick))

        def tick_of(t: int) -> int:
            return min(t // units_per_tick, n_ticks - 1)

        arrived = [0] * n_ticks
        successful = [0] * n_ticks
        failed = [0] * n_ticks
        started_latencies: list[list[int]] = [[] for _ in range(n_ticks)]
        for rec in self.requests.values():
            arrived[tick_of(rec.arrival)] += 1
            if rec.start is not None:
                started_latencies[tick_of(rec.start)].append(
                    request_latency(rec.arrival, rec.start)
                )
            if rec.end is not None:
                if rec.status is RequestStatus.SUCCEEDED:
                    successful[tick_of(rec.end)] += 1
                elif rec.status is RequestStatus.FAILED:
                    failed[tick_of(rec.end)] += 1

        samples: list[TickSample] = []
        cum_arrived = cum_processed = cum_success = cum_fail = 0
        for k in range(n_ticks):
            processed = successful[k] + failed[k]
            cum_arrived += arrived[k]
            cum_processed += processed
            cum_success += successful[k]
            cum_fail += failed[k]
            lats = started_latencies[k]
            samples.append(
                TickSample(
                    tick=k,
                    arrived=arrived[k],
                    processed=processed,
                    successful=successful[k],
                    failed=failed[k],
                    unprocessed=cum_arrived - cum_processed,
                    latency=sum(lats) / len(lats) if lats else None,
                    efficiency=cumulative_efficiency(cum_success, cum_fail),
                )
            )
        return samples

    def ledgers(self, end_time: int) -> dict[str, RobotTimeLedger]:
        """Fold transitions into per-robot time ledgers through end_time."""
        ledgers: dict[str, RobotTimeLedger] = {}
        last: dict[str, tuple[RobotState, int]] = {}
        for tr in self.transitions:
            ledger = ledgers.setdefault(tr.robot_id, RobotTimeLedger())
            if tr.robot_id in last:
                prev_state, prev_at = last[tr.robot_id]
                ledger.accrue(prev_state, tr.at - prev_at)
            last[tr.robot_id] = (tr.to_state, tr.at)
        for robot_id, (state, at) in last.items():
            ledgers[robot_id].accrue(state, end_time - at)
        return ledgers

    def robot_table(self, end_time: int) -> list[dict]:
        rows = []
        ledgers = self.ledgers(end_time)
        for robot_id in sorted(ledgers):
            ledger = ledgers[robot_id]
            if ledger.overall > 0:
                availability, utilization, effectiveness = robot_kpis(ledger)
            else:
                availability = utilization = 0.0
                effectiveness = None
            rows.append(
                {
                    "robot_id": robot_id,
                    "ledger": ledger.to_doc(),
                    "availability": availability,
                    "utilization": utilization,
                    "effectiveness": effectiveness,
                }
            )
        return rows


def ticks_to_csv(samples: list[TickSample]) -> str:
    out = io.StringIO()
    out.write("tick,arrived,processed,successful,failed,unprocessed,latency,efficiency\n")
    for s in samples:
        latency = "" if s.latency is None else repr(s.latency)
        efficiency = "" if s.efficiency is None else repr(s.efficiency)
        out.write(
            f"{s.tick},{s.arrived},{s.processed},{s.successful},{s.failed},"
            f"{s.unprocessed},{latency},{efficiency}\n"
        )
    return out.getvalue()
