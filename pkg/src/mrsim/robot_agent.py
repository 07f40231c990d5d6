"""Simulated robot: capability-bearing timer that reports task feedback."""

from __future__ import annotations

from dataclasses import dataclass

from .bus import Envelope, MessageBus, Performative
from .domain import RobotRecord, RobotState
from .engine import Engine, RngStreams
from .events import TaskCompletion
from .metrics import MetricsCollector

ROBOTS_MANAGER = "robots_manager"


@dataclass(frozen=True)
class RobotAgentConfig:
    id: str
    capabilities: frozenset[str]
    duration_range: tuple[int, int] = (1, 3)
    fail_probability: float = 0.0

    def __post_init__(self) -> None:
        lo, hi = self.duration_range
        if lo < 1 or lo > hi:
            raise ValueError(f"robot {self.id}: bad duration range [{lo}, {hi}]")
        if not 0.0 <= self.fail_probability <= 1.0:
            raise ValueError(f"robot {self.id}: fail_probability out of [0, 1]")


class RobotAgent:
    """Holds one task at a time for a sampled duration, then reports feedback.

    The agent stays bound to the bus for its whole life; envelopes arriving
    while it is not idle are dead-lettered as protocol violation markers.
    """

    def __init__(
        self,
        config: RobotAgentConfig,
        engine: Engine,
        bus: MessageBus,
        record: RobotRecord,
        rng: RngStreams,
        metrics: MetricsCollector,
    ) -> None:
        self.config = config
        self.engine = engine
        self.bus = bus
        self.record = record
        self.rng = rng
        self.metrics = metrics
        bus.subscribe(config.id, self.handle)

    def handle(self, payload) -> None:
        if isinstance(payload, TaskCompletion):
            self.on_completion(payload)
        elif isinstance(payload, Envelope) and payload.performative is Performative.TASK_ASSIGN:
            self.on_task_assign(payload)

    def on_task_assign(self, env: Envelope) -> None:
        rec = self.record
        if rec.state is not RobotState.IDLE:
            self.bus.dead_letter(env, f"robot {rec.id} is {rec.state.value}, not Idle")
            return
        task = env.content["task"]
        rec.state = RobotState.CONTROLLED
        rec.current_task = task.label
        self.metrics.on_transition(rec.id, RobotState.IDLE, RobotState.CONTROLLED, self.engine.now())
        lo, hi = self.config.duration_range
        duration = self.rng.randint("task_duration", lo, hi)
        self.engine.schedule(
            self.engine.now() + duration,
            rec.id,
            TaskCompletion(
                robot_id=rec.id,
                request_id=env.conversation_id,
                task_index=env.content["task_index"],
                task_label=task.label,
            ),
        )

    def on_completion(self, done: TaskCompletion) -> None:
        rec = self.record
        if rec.state is not RobotState.CONTROLLED or rec.current_task != done.task_label:
            # Robot was pulled out (immediate deregistration) mid-task; the
            # feedback is simply never produced.
            return
        failed = (
            self.config.fail_probability > 0.0
            and self.rng.random("task_duration") < self.config.fail_probability
        )
        rec.current_task = None
        rec.state = RobotState.IDLE
        self.metrics.on_transition(rec.id, RobotState.CONTROLLED, RobotState.IDLE, self.engine.now())
        self.bus.send(
            Performative.TASK_FAIL if failed else Performative.TASK_DONE,
            rec.id,
            ROBOTS_MANAGER,
            done.request_id,
            {
                "robot_id": rec.id,
                "task_index": done.task_index,
                "task_label": done.task_label,
            },
        )


def churn_step(manager, rng: RngStreams) -> None:
    """One churn tick: one registered robot leaves, one unregistered joins.

    Both draws are taken against the directory as it stands at the start of
    the step, so the pools are disjoint. The departure draw only considers
    robots that can actually leave this tick (idle, not already winding
    down); otherwise a deferred departure would count twice against the
    one-out/one-in protocol and the registry would decay over long runs.
    """
    directory = manager.directory
    registered = sorted(
        rid
        for rid, rec in directory.items()
        if rec.state is RobotState.IDLE and not rec.pending_deregister
    )
    unregistered = sorted(
        rid for rid, rec in directory.items() if rec.state is RobotState.UNREGISTERED
    )
    if registered:
        manager.deregister(rng.choice("churn", registered))
    if unregistered:
        manager.register(rng.choice("churn", unregistered))
