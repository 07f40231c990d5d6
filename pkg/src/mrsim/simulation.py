"""Wires engine, bus, components, and robots into one runnable simulation."""

from __future__ import annotations

from typing import Optional

from .bus import MessageBus
from .domain import KnowledgeBase, Request, RobotRecord, RobotState
from .engine import Engine, EventHandle, RngStreams, SimTime
from .events import BlueprintCrud, ChurnStep, RegistrationCommand, SubmitRequest
from .metrics import MetricsCollector
from .planner import Planner
from .requests_manager import REQUESTS_MANAGER, RequestsManager
from .robot_agent import RobotAgent, RobotAgentConfig
from .robots_manager import ROBOTS_MANAGER, RobotsManager
from .scenario import GeneratorSpec, Scenario, ScriptEntry, WorkloadEntry


class RequestorSink:
    """Collects the success/fail responses delivered to each requestor label."""

    def __init__(self, bus: MessageBus, engine: Engine) -> None:
        self.bus = bus
        self.engine = engine
        self.outcomes: dict[str, list[dict]] = {}

    def ensure(self, label: str) -> None:
        if label in self.outcomes:
            return
        self.outcomes[label] = []

        def handler(payload, _label=label) -> None:
            reason = payload.content.get("reason")
            if hasattr(reason, "describe"):
                reason = reason.describe()
            self.outcomes[_label].append(
                {
                    "at": self.engine.now(),
                    "performative": payload.performative.value,
                    "request_id": payload.content.get("request_id"),
                    "reason": reason,
                }
            )

        self.bus.subscribe(label, handler)


class Simulation:
    """One scenario bound to one engine loop.

    Workload, churn, and script entries are pre-scheduled at construction in
    a fixed order (workload, churn, script) so that a given (scenario, seed)
    always yields the same event sequence. Nothing runs until run_until().
    """

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self.engine = Engine()
        self.rng = RngStreams(scenario.master_seed)
        self.bus = MessageBus(self.engine)
        self.kb = KnowledgeBase()
        self.metrics = MetricsCollector()
        for bp in scenario.blueprints:
            self.kb.blueprints[bp.id] = bp
        self.requests_manager = RequestsManager(
            self.engine,
            self.bus,
            self.kb,
            self.metrics,
            scenario.capability_universe,
            plan_feedback_timeout=scenario.plan_feedback_timeout,
        )
        self.planner = Planner(
            self.bus, self.kb, self.rng, min_robots=scenario.min_robots, metrics=self.metrics
        )
        self.robots_manager = RobotsManager(
            self.engine,
            self.bus,
            self.kb,
            self.metrics,
            self.rng,
            task_feedback_timeout=scenario.task_feedback_timeout,
            deregistration_policy=scenario.deregistration_policy,
        )
        self.agents: dict[str, RobotAgent] = {}
        for setup in scenario.robots:
            record = RobotRecord(
                id=setup.config.id,
                capabilities=setup.config.capabilities,
                history=setup.initial_history,
                state=RobotState.IDLE if setup.registered_at_start else RobotState.UNREGISTERED,
            )
            self.robots_manager.add_robot(record)
            self.agents[record.id] = RobotAgent(
                setup.config, self.engine, self.bus, record, self.rng, self.metrics
            )
        self.requestors = RequestorSink(self.bus, self.engine)
        self.requestors.ensure("requestor")
        self._preschedule()

    # -- construction ------------------------------------------------------

    def _preschedule(self) -> None:
        sc = self.scenario
        for entry in self._workload_entries():
            self.requestors.ensure(entry.requestor)
            rq = Request(
                id=entry.request_id,
                requestor=entry.requestor,
                blueprint_id=entry.blueprint_id,
                arrival_time=entry.time,
            )
            self.engine.schedule(entry.time, REQUESTS_MANAGER, SubmitRequest(rq))
        if sc.churn_enabled:
            for tick in range(sc.n_ticks):
                for _ in range(sc.churn_steps_per_tick):
                    self.engine.schedule(tick * sc.units_per_tick, ROBOTS_MANAGER, ChurnStep())
        for entry in sorted(sc.script, key=lambda e: e.time):
            self.schedule_script_op(entry.op, entry.payload, entry.time)

    def _workload_entries(self) -> list[WorkloadEntry]:
        sc = self.scenario
        if sc.workload is None:
            return []
        if isinstance(sc.workload, GeneratorSpec):
            entries = []
            counter = 0
            for tick in range(sc.n_ticks):
                for _ in range(sc.workload.requests_per_tick):
                    counter += 1
                    entries.append(
                        WorkloadEntry(
                            time=tick * sc.units_per_tick,
                            request_id=f"Rq{counter}",
                            blueprint_id=self.rng.choice("requests", sc.workload.blueprint_pool),
                        )
                    )
            return entries
        return sorted(sc.workload, key=lambda e: e.time)

    # -- command injection (shared by script replay and the control API) ----

    def schedule_script_op(self, op: str, payload: dict, at: SimTime) -> EventHandle:
        if op == "submit_request":
            requestor = payload.get("requestor", "requestor")
            self.requestors.ensure(requestor)
            rq = Request(
                id=payload["request_id"],
                requestor=requestor,
                blueprint_id=payload["blueprint_id"],
                arrival_time=at,
            )
            return self.engine.schedule(at, REQUESTS_MANAGER, SubmitRequest(rq))
        if op in ("add_blueprint", "modify_blueprint"):
            bp = payload["blueprint"]
            crud_op = "add" if op == "add_blueprint" else "modify"
            return self.engine.schedule(
                at, REQUESTS_MANAGER, BlueprintCrud(crud_op, bp.id, bp)
            )
        if op == "delete_blueprint":
            return self.engine.schedule(
                at, REQUESTS_MANAGER, BlueprintCrud("delete", payload["blueprint_id"])
            )
        if op == "register_robot":
            caps = payload.get("capabilities")
            return self.engine.schedule(
                at,
                ROBOTS_MANAGER,
                RegistrationCommand(
                    "register", payload["robot_id"], frozenset(caps) if caps is not None else None
                ),
            )
        if op == "deregister_robot":
            return self.engine.schedule(
                at, ROBOTS_MANAGER, RegistrationCommand("deregister", payload["robot_id"])
            )
        raise ValueError(f"unknown script op {op!r}")

    def add_runtime_robot(self, config: RobotAgentConfig) -> None:
        """Admit a robot that was not part of the scenario (control surface)."""
        record = RobotRecord(id=config.id, capabilities=config.capabilities)
        self.robots_manager.add_robot(record)
        self.agents[config.id] = RobotAgent(
            config, self.engine, self.bus, record, self.rng, self.metrics
        )

    # -- execution ---------------------------------------------------------

    def now(self) -> SimTime:
        return self.engine.now()

    def run_until(self, t: SimTime) -> int:
        return self.engine.run_until(t)

    def run_to_end(self) -> int:
        return self.engine.run_until(self.scenario.duration)

    # -- state views -------------------------------------------------------

    def finalized_ticks(self) -> int:
        return min(self.now() // self.scenario.units_per_tick, self.scenario.n_ticks)

    def snapshot(self) -> dict:
        """Consistent point-in-time view of the whole simulation."""
        rm = self.requests_manager
        requests = sorted(
            rm.requests.values(), key=lambda r: (r.arrival_time, r.id)
        )
        ctx = self.robots_manager.ctx
        ticks = self.metrics.tick_series(self.scenario.duration, self.scenario.units_per_tick)
        finalized = self.finalized_ticks()
        latest_tick = ticks[finalized - 1].to_doc() if finalized > 0 else None
        return {
            "clock": self.now(),
            "duration": self.scenario.duration,
            "queue": [r.to_doc() for r in requests],
            "in_flight": rm.in_flight.id if rm.in_flight else None,
            "blueprints": [
                self.kb.blueprints[bid].to_doc() for bid in sorted(self.kb.blueprints)
            ],
            "robots": [
                self.kb.robot_directory[rid].to_doc()
                for rid in sorted(self.kb.robot_directory)
            ],
            "active_plan": (
                {"plan": ctx.plan.to_doc(), "cursor": ctx.cursor} if ctx else None
            ),
            "latest_tick": latest_tick,
            "dead_letters": len(self.bus.dead_letters),
        }
