"""Robot registration directory and sequential plan execution with timeouts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bus import Envelope, MessageBus, Performative
from .domain import (
    FailureKind,
    FailureReason,
    KnowledgeBase,
    RobotRecord,
    RobotState,
    VerifiedPlan,
)
from .engine import Engine, EventHandle, RngStreams
from .events import ChurnStep, RegistrationCommand, TaskFeedbackTimeout
from .metrics import MetricsCollector

REQUESTS_MANAGER = "requests_manager"
ROBOTS_MANAGER = "robots_manager"

DEREGISTRATION_POLICIES = ("defer", "immediate")


@dataclass
class ExecutionContext:
    plan: VerifiedPlan
    cursor: int = 0
    task_timer: Optional[EventHandle] = None


class RobotsManager:
    def __init__(
        self,
        engine: Engine,
        bus: MessageBus,
        kb: KnowledgeBase,
        metrics: MetricsCollector,
        rng: RngStreams,
        task_feedback_timeout: int = 10,
        deregistration_policy: str = "defer",
    ) -> None:
        if deregistration_policy not in DEREGISTRATION_POLICIES:
            raise ValueError(f"unknown deregistration policy {deregistration_policy!r}")
        self.engine = engine
        self.bus = bus
        self.kb = kb
        self.metrics = metrics
        self.rng = rng
        self.task_feedback_timeout = task_feedback_timeout
        self.deregistration_policy = deregistration_policy
        self.ctx: Optional[ExecutionContext] = None
        self.stale_feedback: list[dict] = []
        self.registration_errors: list[str] = []
        bus.subscribe(ROBOTS_MANAGER, self.handle)

    @property
    def directory(self) -> dict[str, RobotRecord]:
        return self.kb.robot_directory

    def handle(self, payload) -> None:
        if isinstance(payload, TaskFeedbackTimeout):
            self.on_task_timeout(payload)
        elif isinstance(payload, RegistrationCommand):
            if payload.op == "register":
                error = self.register(payload.robot_id, payload.capabilities)
                if error:
                    self.registration_errors.append(error)
            else:
                result = self.deregister(payload.robot_id)
                if result not in ("ok", "deferred"):
                    self.registration_errors.append(result)
        elif isinstance(payload, ChurnStep):
            from .robot_agent import churn_step

            churn_step(self, self.rng)
        elif isinstance(payload, Envelope):
            if payload.performative is Performative.PLAN_VERIFIED:
                self.on_verified_plan(payload)
            elif payload.performative in (Performative.TASK_DONE, Performative.TASK_FAIL):
                self.on_task_feedback(payload)
            elif payload.performative is Performative.REGISTER:
                error = self.register(
                    payload.content["robot_id"], payload.content.get("capabilities")
                )
                if error:
                    self.registration_errors.append(error)
            elif payload.performative is Performative.DEREGISTER:
                result = self.deregister(payload.content["robot_id"])
                if result not in ("ok", "deferred"):
                    self.registration_errors.append(result)

    # -- directory ---------------------------------------------------------

    def add_robot(self, record: RobotRecord) -> None:
        """Install a scenario robot at t=0 with its initial state."""
        self.directory[record.id] = record
        self.metrics.on_transition(record.id, None, record.state, self.engine.now())

    def register(self, robot_id: str, capabilities=None) -> Optional[str]:
        rec = self.directory.get(robot_id)
        if rec is None:
            return f"unknown robot {robot_id}"
        if rec.state is not RobotState.UNREGISTERED:
            return f"robot {robot_id} already registered"
        if capabilities is not None:
            rec.capabilities = frozenset(capabilities)
        rec.pending_deregister = False
        self._transition(rec, RobotState.IDLE)
        return None

    def deregister(self, robot_id: str) -> str:
        rec = self.directory.get(robot_id)
        if rec is None:
            return f"unknown robot {robot_id}"
        if rec.state is RobotState.UNREGISTERED:
            return f"robot {robot_id} not registered"
        if rec.pending_deregister:
            return f"robot {robot_id} already leaving"
        if rec.state is RobotState.IDLE:
            self._transition(rec, RobotState.UNREGISTERED)
            return "ok"
        # Controlled robot: policy decides whether the task is allowed to finish.
        if self.deregistration_policy == "defer":
            rec.pending_deregister = True
            return "deferred"
        rec.current_task = None
        self._transition(rec, RobotState.UNREGISTERED)
        return "ok"

    def _transition(self, rec: RobotRecord, to_state: RobotState) -> None:
        from_state = rec.state
        rec.state = to_state
        if to_state is not RobotState.CONTROLLED:
            rec.current_task = None
        self.metrics.on_transition(rec.id, from_state, to_state, self.engine.now())

    # -- plan execution ----------------------------------------------------

    def on_verified_plan(self, env: Envelope) -> None:
        plan: VerifiedPlan = env.content["plan"]
        if self.ctx is not None:
            self.bus.send(
                Performative.PLAN_EXEC_FAIL,
                ROBOTS_MANAGER,
                REQUESTS_MANAGER,
                plan.request_id,
                {"request_id": plan.request_id,
                 "reason": FailureReason(FailureKind.ROBOT_UNAVAILABLE, "plan overlap")},
            )
            return
        self.ctx = ExecutionContext(plan=plan)
        self.assign_current()

    def assign_current(self) -> None:
        ctx = self.ctx
        if ctx.cursor >= len(ctx.plan.assignments):
            request_id = ctx.plan.request_id
            self.ctx = None
            self.bus.send(
                Performative.PLAN_EXEC_SUCCESS,
                ROBOTS_MANAGER,
                REQUESTS_MANAGER,
                request_id,
                {"request_id": request_id},
            )
            return
        task, robot_id = ctx.plan.assignments[ctx.cursor]
        rec = self.directory.get(robot_id)
        if rec is None or rec.state is RobotState.UNREGISTERED:
            self._fail_plan(FailureReason(FailureKind.ROBOT_UNAVAILABLE, robot_id))
            return
        self.bus.send(
            Performative.TASK_ASSIGN,
            ROBOTS_MANAGER,
            robot_id,
            ctx.plan.request_id,
            {
                "plan_id": ctx.plan.plan_id,
                "task": task,
                "task_index": ctx.cursor,
                "robot_id": robot_id,
            },
        )
        ctx.task_timer = self.engine.schedule(
            self.engine.now() + self.task_feedback_timeout,
            ROBOTS_MANAGER,
            TaskFeedbackTimeout(ctx.plan.request_id, ctx.cursor),
        )

    def on_task_feedback(self, env: Envelope) -> None:
        robot_id = env.content["robot_id"]
        rec = self.directory.get(robot_id)
        if env.performative is Performative.TASK_DONE and rec is not None:
            # Completed work stays counted even when the plan already failed.
            rec.history += 1
        if rec is not None and rec.pending_deregister and rec.state is RobotState.IDLE:
            self._transition(rec, RobotState.UNREGISTERED)
            rec.pending_deregister = False
        ctx = self.ctx
        fresh = (
            ctx is not None
            and env.conversation_id == ctx.plan.request_id
            and env.content["task_index"] == ctx.cursor
        )
        if not fresh:
            self.stale_feedback.append(
                {"at": self.engine.now(), "conversation_id": env.conversation_id,
                 "performative": env.performative.value}
            )
            return
        if ctx.task_timer is not None:
            self.engine.cancel(ctx.task_timer)
            ctx.task_timer = None
        if env.performative is Performative.TASK_DONE:
            ctx.cursor += 1
            self.assign_current()
        else:
            self._fail_plan(FailureReason(FailureKind.TASK_NEGATIVE_FEEDBACK, env.content["task_label"]))

    def on_task_timeout(self, evt: TaskFeedbackTimeout) -> None:
        ctx = self.ctx
        if ctx is None or ctx.plan.request_id != evt.request_id or ctx.cursor != evt.task_index:
            return
        ctx.task_timer = None
        self._fail_plan(FailureReason(FailureKind.TASK_FEEDBACK_TIMEOUT))

    def _fail_plan(self, reason: FailureReason) -> None:
        ctx = self.ctx
        if ctx.task_timer is not None:
            self.engine.cancel(ctx.task_timer)
        request_id = ctx.plan.request_id
        self.ctx = None
        self.bus.send(
            Performative.PLAN_EXEC_FAIL,
            ROBOTS_MANAGER,
            REQUESTS_MANAGER,
            request_id,
            {"request_id": request_id, "reason": reason},
        )
