"""Batch runner: execute a scenario to its horizon and package the results."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .metrics import TickSample, ticks_to_csv
from .scenario import Scenario
from .simulation import Simulation


@dataclass
class RunReport:
    master_seed: int
    duration: int
    units_per_tick: int
    delivered_events: int
    trace: list[dict]
    ticks: list[TickSample]
    robot_table: list[dict]
    requests: list[dict]
    requestor_outcomes: dict[str, list[dict]]
    dead_letters: list[dict]

    def to_doc(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "duration": self.duration,
            "units_per_tick": self.units_per_tick,
            "delivered_events": self.delivered_events,
            "ticks": [t.to_doc() for t in self.ticks],
            "robot_table": self.robot_table,
            "requests": self.requests,
            "requestor_outcomes": self.requestor_outcomes,
            "dead_letters": self.dead_letters,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, indent=2) + "\n"

    def trace_text(self) -> str:
        return "".join(
            json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n"
            for line in self.trace
        )

    def ticks_csv(self) -> str:
        return ticks_to_csv(self.ticks)


def build_report(sim: Simulation, delivered: int) -> RunReport:
    sc = sim.scenario
    return RunReport(
        master_seed=sc.master_seed,
        duration=sc.duration,
        units_per_tick=sc.units_per_tick,
        delivered_events=delivered,
        trace=sim.engine.trace,
        ticks=sim.metrics.tick_series(sc.duration, sc.units_per_tick),
        robot_table=sim.metrics.robot_table(sc.duration),
        requests=[
            rq.to_doc()
            for rq in sorted(
                sim.requests_manager.requests.values(), key=lambda r: (r.arrival_time, r.id)
            )
        ],
        requestor_outcomes=sim.requestors.outcomes,
        dead_letters=[d.to_doc() for d in sim.bus.dead_letters],
    )


def run(scenario: Scenario) -> RunReport:
    sim = Simulation(scenario)
    delivered = sim.run_to_end()
    return build_report(sim, delivered)


def write_report(report: RunReport, out_dir: Union[str, Path], fmt: str = "csv", trace: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    if fmt == "csv":
        emit("ticks.csv", report.ticks_csv())
    else:
        emit(
            "ticks.json",
            json.dumps([t.to_doc() for t in report.ticks], sort_keys=True, indent=2) + "\n",
        )
    emit("robots.json", json.dumps(report.robot_table, sort_keys=True, indent=2) + "\n")
    emit("summary.json", report.to_json())
    if trace:
        emit("trace.jsonl", report.trace_text())
    return written
