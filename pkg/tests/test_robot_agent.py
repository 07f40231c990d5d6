import pytest

from conftest import make_sim

from mrsim.domain import RobotState
from mrsim.engine import RngStreams
from mrsim.robot_agent import RobotAgentConfig, churn_step


def submit(sim, request_id, blueprint_id, at):
    sim.schedule_script_op(
        "submit_request", {"request_id": request_id, "blueprint_id": blueprint_id}, at
    )


class TestConfig:
    def test_duration_lower_bound(self):
        with pytest.raises(ValueError):
            RobotAgentConfig(id="R", capabilities=frozenset(["C1"]), duration_range=(0, 3))

    def test_duration_inverted_range(self):
        with pytest.raises(ValueError):
            RobotAgentConfig(id="R", capabilities=frozenset(["C1"]), duration_range=(4, 2))

    def test_fail_probability_bounds(self):
        with pytest.raises(ValueError):
            RobotAgentConfig(id="R", capabilities=frozenset(["C1"]), fail_probability=1.5)


class TestTaskExecution:
    def test_degenerate_duration_is_exact(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(30)
        # [2,2] durations, three sequential tasks: busy windows [0,2),[2,4),[4,6).
        idle_times = [
            tr.at
            for tr in sim.metrics.transitions
            if tr.from_state is RobotState.CONTROLLED and tr.to_state is RobotState.IDLE
        ]
        assert idle_times == [2, 4, 6]

    def test_sampled_duration_within_range(self):
        sim = make_sim(
            robots=[
                {"id": "R1", "capabilities": ["C1", "C2", "C3", "C4"],
                 "duration_range": [1, 3], "registered_at_start": True},
                {"id": "R3", "capabilities": ["C2", "C5"],
                 "duration_range": [1, 3], "registered_at_start": True},
            ],
        )
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(30)
        busy_since: dict[str, int] = {}
        for tr in sim.metrics.transitions:
            if tr.to_state is RobotState.CONTROLLED:
                busy_since[tr.robot_id] = tr.at
            elif tr.from_state is RobotState.CONTROLLED:
                assert 1 <= tr.at - busy_since.pop(tr.robot_id) <= 3

    def test_assignment_while_busy_dead_letters(self, sim):
        from mrsim.bus import Performative
        from mrsim.domain import TaskSpec

        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(0)
        assert sim.kb.robot_directory["R1"].state is RobotState.CONTROLLED
        sim.bus.send(
            Performative.TASK_ASSIGN,
            "robots_manager",
            "R1",
            "RqX",
            {"plan_id": "PX", "task": TaskSpec("TX", frozenset(["C2"])),
             "task_index": 0, "robot_id": "R1"},
        )
        sim.run_until(1)
        assert any(
            dl.envelope.conversation_id == "RqX" for dl in sim.bus.dead_letters
        )

    def test_always_failing_robot_reports_task_fail(self):
        sim = make_sim(
            blueprints=[{"id": "Pb1", "tasks": [{"label": "T1", "required": ["C1"]}]}],
            robots=[
                {"id": "R1", "capabilities": ["C1"], "duration_range": [2, 2],
                 "fail_probability": 1.0, "registered_at_start": True},
                {"id": "R2", "capabilities": ["C2"], "duration_range": [2, 2],
                 "registered_at_start": True},
            ],
        )
        submit(sim, "Rq1", "Pb1", 0)
        sim.run_until(30)
        rec = sim.metrics.requests["Rq1"]
        assert rec.reason == "TaskNegativeFeedback(T1)"

    def test_runs_reproduce_exactly(self):
        def transitions():
            sim = make_sim(
                robots=[
                    {"id": "R1", "capabilities": ["C1", "C2", "C3", "C4"],
                     "duration_range": [1, 3], "registered_at_start": True},
                    {"id": "R3", "capabilities": ["C2", "C5"],
                     "duration_range": [1, 3], "registered_at_start": True},
                ],
            )
            for i in range(1, 4):
                submit(sim, f"Rq{i}", "Pb2", 0)
            sim.run_until(30)
            return [tr.to_doc() for tr in sim.metrics.transitions]

        assert transitions() == transitions()


class TestChurnStep:
    def test_one_out_one_in(self, sim):
        sim.robots_manager.deregister("R3")
        churn_step(sim.robots_manager, RngStreams(0))
        directory = sim.kb.robot_directory
        assert directory["R1"].state is RobotState.UNREGISTERED
        assert directory["R3"].state is RobotState.IDLE

    def test_pools_snapshotted_disjointly(self, sim):
        # R1, R3 both idle, nobody unregistered: one leaves, nobody joins,
        # and the robot that just left is not drawn back in the same step.
        churn_step(sim.robots_manager, RngStreams(0))
        states = {rid: rec.state for rid, rec in sim.kb.robot_directory.items()}
        assert sorted(states.values(), key=lambda s: s.value) in (
            [RobotState.IDLE, RobotState.UNREGISTERED],
            [RobotState.UNREGISTERED, RobotState.IDLE],
        )
        assert list(states.values()).count(RobotState.UNREGISTERED) == 1

    def test_busy_robots_never_drawn(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(0)
        assert sim.kb.robot_directory["R1"].state is RobotState.CONTROLLED
        for seed in range(10):
            churn_step(sim.robots_manager, RngStreams(seed))
            assert sim.kb.robot_directory["R1"].state is RobotState.CONTROLLED
            sim.robots_manager.register("R3")

    def test_registered_count_stable_without_busy_robots(self, sim):
        rng = RngStreams(5)
        sim.robots_manager.deregister("R3")
        for _ in range(50):
            churn_step(sim.robots_manager, rng)
            registered = [
                r for r in sim.kb.robot_directory.values()
                if r.state is not RobotState.UNREGISTERED
            ]
            assert len(registered) == 1
