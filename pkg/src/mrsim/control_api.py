"""HTTP control surface: command injection, snapshots, metrics, event stream.

Commands are injected as engine events at the current simulation time and
take effect when the clock next runs; the clock never advances on its own
unless a free-running RunClock is active.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse

from .events import BlueprintCrud
from .domain import PlanBlueprint, RobotState, validate_blueprint
from .robot_agent import RobotAgentConfig
from .scenario import Scenario
from .simulation import Simulation

COMMAND_KINDS = (
    "SubmitRequest",
    "AddBlueprint",
    "ModifyBlueprint",
    "DeleteBlueprint",
    "RegisterRobot",
    "DeregisterRobot",
    "StepClock",
    "RunClock",
    "PauseClock",
)


class CommandError(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class Session:
    """One live simulation plus its published event feed.

    Network handlers call into the session under one lock; the engine itself
    stays single-threaded.
    """

    def __init__(self, scenario: Scenario, pace_units_per_second: float = 2.0) -> None:
        self.scenario = scenario
        self.sim = Simulation(scenario)
        self.pace = pace_units_per_second
        self.lock = threading.RLock()
        self.feed: list[dict] = []
        self._trace_cursor = 0
        self._transition_cursor = 0
        self._ticks_published = 0
        self._command_counter = 0
        self._request_counter = 0
        self._pending_registration: dict[str, str] = {}
        self._free_run_stop = threading.Event()
        self._free_run_thread: Optional[threading.Thread] = None

    # -- feed --------------------------------------------------------------

    def _publish(self) -> None:
        trace = self.sim.engine.trace
        while self._trace_cursor < len(trace):
            self._append_frame("event", trace[self._trace_cursor])
            self._trace_cursor += 1
        transitions = self.sim.metrics.transitions
        while self._transition_cursor < len(transitions):
            self._append_frame("transition", transitions[self._transition_cursor].to_doc())
            self._transition_cursor += 1
        finalized = self.sim.finalized_ticks()
        if finalized > self._ticks_published:
            samples = self.sim.metrics.tick_series(
                self.scenario.duration, self.scenario.units_per_tick
            )
            for k in range(self._ticks_published, finalized):
                self._append_frame("tick", samples[k].to_doc())
            self._ticks_published = finalized

    def _append_frame(self, kind: str, body: dict) -> None:
        self.feed.append({"seq": len(self.feed), "kind": kind, "body": body})

    def frames_since(self, since: int) -> list[dict]:
        with self.lock:
            start = max(since + 1, 0)
            return self.feed[start:]

    # -- clock -------------------------------------------------------------

    def _advance(self, t: int) -> None:
        self.sim.run_until(t)
        self._pending_registration.clear()
        self._publish()

    def pause(self) -> None:
        self._free_run_stop.set()
        thread = self._free_run_thread
        if thread is not None:
            thread.join(timeout=5)
            self._free_run_thread = None

    @property
    def running(self) -> bool:
        return self._free_run_thread is not None and self._free_run_thread.is_alive()

    def _free_run(self, until: Optional[int]) -> None:
        horizon = self.scenario.duration if until is None else min(until, self.scenario.duration)
        while not self._free_run_stop.is_set():
            with self.lock:
                now = self.sim.now()
                if now >= horizon:
                    break
                self._advance(now + 1)
            time.sleep(1.0 / self.pace)

    # -- commands ----------------------------------------------------------

    def apply(self, command: dict) -> dict:
        with self.lock:
            kind = command.get("kind")
            if kind not in COMMAND_KINDS:
                raise CommandError(f"unknown command kind {kind!r}")
            self._command_counter += 1
            command_id = command.get("command_id") or f"cmd-{self._command_counter}"
            applied_at = self.sim.now()
            getattr(self, f"_cmd_{_snake(kind)}")(command)
            self._publish()
            return {"command_id": command_id, "applied_at": applied_at}

    def _cmd_submit_request(self, cmd: dict) -> None:
        blueprint_id = cmd.get("blueprint_id")
        if not blueprint_id:
            raise CommandError("SubmitRequest needs blueprint_id")
        request_id = cmd.get("request_id")
        if request_id is None:
            self._request_counter += 1
            request_id = f"CRq{self._request_counter}"
        if request_id in self.sim.requests_manager.requests:
            raise CommandError(f"duplicate request id {request_id}")
        self.sim.schedule_script_op(
            "submit_request",
            {
                "request_id": request_id,
                "blueprint_id": blueprint_id,
                "requestor": cmd.get("requestor", "requestor"),
            },
            self.sim.now(),
        )

    def _blueprint_command(self, cmd: dict, op: str) -> None:
        if op == "delete_blueprint":
            blueprint_id = cmd.get("blueprint_id")
            if not blueprint_id:
                raise CommandError("DeleteBlueprint needs blueprint_id")
            payload = {"blueprint_id": blueprint_id}
            check = BlueprintCrud("delete", blueprint_id)
        else:
            try:
                bp = PlanBlueprint.from_doc(cmd["blueprint"])
            except (KeyError, TypeError, ValueError) as exc:
                raise CommandError(f"bad blueprint: {exc}") from exc
            crud_op = "add" if op == "add_blueprint" else "modify"
            payload = {"blueprint": bp}
            check = BlueprintCrud(crud_op, bp.id, bp)
        error = self.sim.requests_manager.check_crud(check)
        if error is not None:
            raise CommandError(error)
        self.sim.schedule_script_op(op, payload, self.sim.now())

    def _cmd_add_blueprint(self, cmd: dict) -> None:
        self._blueprint_command(cmd, "add_blueprint")

    def _cmd_modify_blueprint(self, cmd: dict) -> None:
        self._blueprint_command(cmd, "modify_blueprint")

    def _cmd_delete_blueprint(self, cmd: dict) -> None:
        self._blueprint_command(cmd, "delete_blueprint")

    def _cmd_register_robot(self, cmd: dict) -> None:
        robot_id = cmd.get("robot_id")
        if not robot_id:
            raise CommandError("RegisterRobot needs robot_id")
        capabilities = cmd.get("capabilities")
        if capabilities is not None:
            unknown = sorted(frozenset(capabilities) - self.sim.scenario.capability_universe)
            if unknown:
                raise CommandError(f"unknown capabilities: {', '.join(unknown)}")
        record = self.sim.kb.robot_directory.get(robot_id)
        if record is None:
            if capabilities is None:
                raise CommandError(f"new robot {robot_id} needs capabilities")
            self.sim.add_runtime_robot(
                RobotAgentConfig(id=robot_id, capabilities=frozenset(capabilities))
            )
        elif record.state is not RobotState.UNREGISTERED:
            raise CommandError(f"robot {robot_id} already registered")
        if self._pending_registration.get(robot_id) == "register":
            raise CommandError(f"robot {robot_id} registration already queued")
        self._pending_registration[robot_id] = "register"
        self.sim.schedule_script_op(
            "register_robot",
            {"robot_id": robot_id, "capabilities": capabilities},
            self.sim.now(),
        )

    def _cmd_deregister_robot(self, cmd: dict) -> None:
        robot_id = cmd.get("robot_id")
        record = self.sim.kb.robot_directory.get(robot_id)
        if record is None:
            raise CommandError(f"unknown robot {robot_id}")
        if record.state is RobotState.UNREGISTERED and self._pending_registration.get(robot_id) != "register":
            raise CommandError(f"robot {robot_id} not registered")
        if self._pending_registration.get(robot_id) == "deregister":
            raise CommandError(f"robot {robot_id} deregistration already queued")
        self._pending_registration[robot_id] = "deregister"
        self.sim.schedule_script_op("deregister_robot", {"robot_id": robot_id}, self.sim.now())

    def _cmd_step_clock(self, cmd: dict) -> None:
        units = cmd.get("units", 1)
        if not isinstance(units, int) or units < 0:
            raise CommandError("StepClock units must be a non-negative integer")
        self._advance(min(self.sim.now() + units, self.scenario.duration))

    def _cmd_run_clock(self, cmd: dict) -> None:
        until = cmd.get("until")
        if until is not None:
            if not isinstance(until, int) or until < self.sim.now():
                raise CommandError("RunClock until must be >= current time")
        if self.running:
            raise CommandError("clock already running")
        self._free_run_stop.clear()
        self._free_run_thread = threading.Thread(
            target=self._free_run, args=(until,), daemon=True
        )
        self._free_run_thread.start()

    def _cmd_pause_clock(self, cmd: dict) -> None:
        self.pause()

    # -- views -------------------------------------------------------------

    def snapshot(self) -> dict:
        with self.lock:
            doc = self.sim.snapshot()
            doc["paused"] = not self.running
            return doc

    def metrics_series(self, start: int, end: Optional[int]) -> list[dict]:
        with self.lock:
            finalized = self.sim.finalized_ticks()
            samples = self.sim.metrics.tick_series(
                self.scenario.duration, self.scenario.units_per_tick
            )[:finalized]
            if end is None:
                end = finalized
            start = max(start, 0)
            end = min(end, finalized)
            return [s.to_doc() for s in samples[start:end]]


def _snake(kind: str) -> str:
    out = []
    for i, ch in enumerate(kind):
        if ch.isupper() and i > 0:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


def _sse_frame(frame: dict) -> str:
    body = json.dumps(frame["body"], sort_keys=True, separators=(",", ":"))
    return f"id: {frame['seq']}\nevent: {frame['kind']}\ndata: {body}\n\n"


def create_app(scenario: Scenario, pace_units_per_second: float = 2.0) -> FastAPI:
    app = FastAPI(title="mrsim control api")
    session = Session(scenario, pace_units_per_second)
    app.state.session = session

    @app.post("/commands")
    async def post_command(request: Request):
        try:
            command = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        if not isinstance(command, dict):
            raise HTTPException(status_code=400, detail="body must be a JSON object")
        try:
            return session.apply(command)
        except CommandError as exc:
            return JSONResponse(status_code=400, content={"reason": exc.reason})

    @app.get("/state")
    async def get_state():
        return session.snapshot()

    @app.get("/metrics")
    async def get_metrics(
        start: int = Query(0, alias="from"), to: Optional[int] = Query(None)
    ):
        return {"samples": session.metrics_series(start, to)}

    @app.get("/events")
    async def get_events(since: int = -1, follow: bool = False):
        async def stream():
            cursor = since
            while True:
                frames = session.frames_since(cursor)
                for frame in frames:
                    cursor = frame["seq"]
                    yield _sse_frame(frame)
                if not follow:
                    break
                await asyncio.sleep(0.1)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/trace")
    async def get_trace():
        with session.lock:
            text = "".join(
                json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n"
                for line in session.sim.engine.trace
            )
        return PlainTextResponse(text)

    return app
