"""Blueprint-to-plan transformation: capability matching and history balancing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .bus import Envelope, MessageBus, Performative
from .domain import (
    FailureKind,
    FailureReason,
    KnowledgeBase,
    PlanBlueprint,
    TaskSpec,
    VerifiedPlan,
    satisfies,
)
from .engine import RngStreams

REQUESTS_MANAGER = "requests_manager"
PLANNER = "planner"
ROBOTS_MANAGER = "robots_manager"


@dataclass(frozen=True)
class SnapshotRobot:
    id: str
    capabilities: frozenset[str]
    history: int


@dataclass
class PlannerSnapshot:
    """Immutable view of the registered robots at the planning instant."""

    robots: tuple[SnapshotRobot, ...]

    @classmethod
    def from_kb(cls, kb: KnowledgeBase) -> "PlannerSnapshot":
        robots = tuple(
            SnapshotRobot(r.id, r.capabilities, r.history)
            for r in sorted(kb.registered_robots(), key=lambda r: r.id)
        )
        return cls(robots=robots)


class PlanFailure(Exception):
    def __init__(self, reason: FailureReason) -> None:
        super().__init__(reason.describe())
        self.reason = reason


def eligible(task: TaskSpec, snap: PlannerSnapshot) -> list[str]:
    """Registered robots whose capability set covers the task, sorted by id."""
    return sorted(r.id for r in snap.robots if satisfies(r.capabilities, task))


def select_robot(
    candidates: list[str],
    tentative: dict[str, int],
    tie_marks: set[str],
    rng: RngStreams,
) -> str:
    """Pick an argmin-load candidate; break ties randomly, rotating via marks.

    A robot chosen by tie-break is marked so the next equal-load tie prefers
    an unmarked peer; when every robot in the tied subset is marked, the
    subset's marks are cleared and the rotation restarts.
    """
    if not candidates:
        raise ValueError("no candidates")
    lowest = min(tentative[r] for r in candidates)
    argmin = sorted(r for r in candidates if tentative[r] == lowest)
    if len(argmin) == 1:
        return argmin[0]
    unmarked = [r for r in argmin if r not in tie_marks]
    if not unmarked:
        tie_marks.difference_update(argmin)
        unmarked = argmin
    chosen = unmarked[0] if len(unmarked) == 1 else rng.choice("planner_tie", unmarked)
    tie_marks.add(chosen)
    return chosen


def plan(
    bp: PlanBlueprint,
    snap: PlannerSnapshot,
    min_robots: int,
    tie_marks: set[str],
    rng: RngStreams,
    plan_id: str,
    request_id: str,
) -> VerifiedPlan:
    """Assign every task in blueprint order to a capable robot of minimal
    tentative load (persistent history plus tasks already planned here).

    Raises PlanFailure when fewer than min_robots are registered or a task
    has no capable robot.
    """
    if len(snap.robots) < min_robots:
        raise PlanFailure(FailureReason(FailureKind.INSUFFICIENT_ROBOTS))
    tentative = {r.id: r.history for r in snap.robots}
    assignments: list[tuple[TaskSpec, str]] = []
    for task in bp.tasks:
        candidates = eligible(task, snap)
        if not candidates:
            raise PlanFailure(FailureReason(FailureKind.NO_CAPABLE_ROBOT, task.label))
        robot = select_robot(candidates, tentative, tie_marks, rng)
        tentative[robot] += 1
        assignments.append((task, robot))
    return VerifiedPlan(plan_id=plan_id, request_id=request_id, assignments=tuple(assignments))


def make_plan_id(request_id: str) -> str:
    if request_id.startswith("Rq"):
        return "P" + request_id[2:]
    return "P-" + request_id


class Planner:
    """Bus-facing planner component; holds the tie-mark rotation state."""

    def __init__(
        self,
        bus: MessageBus,
        kb: KnowledgeBase,
        rng: RngStreams,
        min_robots: int = 2,
        metrics=None,
    ) -> None:
        self.bus = bus
        self.kb = kb
        self.rng = rng
        self.min_robots = min_robots
        self.metrics = metrics
        self.tie_marks: set[str] = set()
        bus.subscribe(PLANNER, self.handle)

    def handle(self, payload) -> None:
        if isinstance(payload, Envelope) and payload.performative is Performative.BLUEPRINT_TO_PLANNER:
            self.on_blueprint(payload)

    def on_blueprint(self, env: Envelope) -> None:
        bp: PlanBlueprint = env.content["blueprint"]
        request_id: str = env.conversation_id
        snap = PlannerSnapshot.from_kb(self.kb)
        try:
            verified = plan(
                bp,
                snap,
                self.min_robots,
                self.tie_marks,
                self.rng,
                plan_id=make_plan_id(request_id),
                request_id=request_id,
            )
        except PlanFailure as failure:
            if self.metrics is not None:
                self.metrics.on_planning(request_id, "fail", failure.reason.describe(), None)
            self.bus.send(
                Performative.PLAN_FAIL,
                PLANNER,
                REQUESTS_MANAGER,
                request_id,
                {"request_id": request_id, "reason": failure.reason},
            )
            return
        if self.metrics is not None:
            self.metrics.on_planning(
                request_id,
                "verified",
                None,
                [(task.label, robot) for task, robot in verified.assignments],
            )
        self.bus.send(
            Performative.PLAN_VERIFIED,
            PLANNER,
            ROBOTS_MANAGER,
            request_id,
            {"plan": verified},
        )
