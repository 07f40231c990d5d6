from conftest import make_sim

from mrsim.domain import RequestStatus


def submit(sim, request_id, blueprint_id, at):
    sim.schedule_script_op(
        "submit_request", {"request_id": request_id, "blueprint_id": blueprint_id}, at
    )


class TestIntake:
    def test_idle_system_starts_request_immediately(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(0)
        rq = sim.requests_manager.requests["Rq1"]
        assert rq.status is RequestStatus.IN_PROGRESS
        assert rq.start_time == 0
        assert not sim.requests_manager.queue

    def test_second_request_waits_for_feedback(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        submit(sim, "Rq2", "Pb2", 1)
        sim.run_until(1)
        assert sim.requests_manager.requests["Rq1"].status is RequestStatus.IN_PROGRESS
        assert sim.requests_manager.requests["Rq2"].status is RequestStatus.QUEUED

    def test_fcfs_burst_start_order(self, sim):
        for i in range(1, 6):
            submit(sim, f"Rq{i}", "Pb2", 0)
        sim.run_until(30)
        records = sim.metrics.requests
        starts = [(records[f"Rq{i}"].start, f"Rq{i}") for i in range(1, 6)]
        assert starts == sorted(starts)

    def test_duplicate_id_rejected_without_lifecycle(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        submit(sim, "Rq1", "Pb2", 1)
        sim.run_until(2)
        fails = [
            o
            for o in sim.requestors.outcomes["requestor"]
            if o["reason"] == "DuplicateRequestId"
        ]
        assert len(fails) == 1
        assert len(sim.metrics.requests) == 1


class TestMatching:
    def test_known_blueprint_matches(self, sim):
        submit(sim, "Rq2", "Pb2", 0)
        sim.run_until(30)
        assert sim.requests_manager.requests["Rq2"].status is RequestStatus.SUCCEEDED

    def test_unknown_blueprint_fails_and_advances(self, sim):
        submit(sim, "Rq1", "PbX", 0)
        submit(sim, "Rq2", "Pb2", 0)
        sim.run_until(30)
        rq1 = sim.requests_manager.requests["Rq1"]
        assert rq1.status is RequestStatus.FAILED
        assert rq1.failure.describe() == "NoBlueprintMatch"
        assert sim.requests_manager.requests["Rq2"].status is RequestStatus.SUCCEEDED

    def test_blueprint_deleted_before_match(self):
        sim = make_sim(
            script=[{"time": 1, "op": "delete_blueprint", "blueprint_id": "Pb2"}]
        )
        submit(sim, "Rq1", "Pb2", 2)
        sim.run_until(30)
        assert sim.requests_manager.requests["Rq1"].failure.describe() == "NoBlueprintMatch"


class TestCrud:
    def test_add_then_match(self, sim):
        bp_doc = {"id": "Pb4", "tasks": [{"label": "T1", "required": ["C2"]}]}
        sim.schedule_script_op(
            "add_blueprint",
            {"blueprint": __import__("mrsim").PlanBlueprint.from_doc(bp_doc)},
            0,
        )
        submit(sim, "Rq1", "Pb4", 1)
        sim.run_until(30)
        assert sim.requests_manager.requests["Rq1"].status is RequestStatus.SUCCEEDED

    def test_add_duplicate_id_errors(self, sim):
        bp = sim.kb.blueprints["Pb2"]
        sim.schedule_script_op("add_blueprint", {"blueprint": bp}, 0)
        sim.run_until(0)
        assert any("duplicate blueprint id" in e for e in sim.requests_manager.crud_errors)

    def test_delete_unknown_errors(self, sim):
        sim.schedule_script_op("delete_blueprint", {"blueprint_id": "PbX"}, 0)
        sim.run_until(0)
        assert any("unknown blueprint id" in e for e in sim.requests_manager.crud_errors)

    def test_modify_changes_subsequent_plans(self, sim):
        from mrsim import PlanBlueprint

        modified = PlanBlueprint.from_doc(
            {"id": "Pb2", "tasks": [{"label": "T2", "required": ["C2"]}]}
        )
        submit(sim, "Rq1", "Pb2", 0)
        sim.schedule_script_op("modify_blueprint", {"blueprint": modified}, 8)
        submit(sim, "Rq2", "Pb2", 9)
        sim.run_until(30)
        plans = {p["request_id"]: p for p in sim.metrics.planning}
        assert [label for label, _ in plans["Rq1"]["assignments"]] == ["T1", "T2", "T3"]
        assert [label for label, _ in plans["Rq2"]["assignments"]] == ["T2"]

    def test_inflight_snapshot_immune_to_modify(self, sim):
        from mrsim import PlanBlueprint

        modified = PlanBlueprint.from_doc(
            {"id": "Pb2", "tasks": [{"label": "TX", "required": ["C2"]}]}
        )
        submit(sim, "Rq1", "Pb2", 0)
        # Dispatch happens at t=0; the modify lands afterward in the same run.
        sim.schedule_script_op("modify_blueprint", {"blueprint": modified}, 1)
        sim.run_until(30)
        plans = {p["request_id"]: p for p in sim.metrics.planning}
        assert [label for label, _ in plans["Rq1"]["assignments"]] == ["T1", "T2", "T3"]


class TestTimeoutsAndStaleFeedback:
    def test_plan_feedback_timeout_fails_request(self):
        sim = make_sim(
            timeouts={"plan_feedback": 3, "task_feedback": 50},
            robots=[
                {"id": "R1", "capabilities": ["C1", "C2", "C3", "C4"],
                 "duration_range": [10, 10], "registered_at_start": True},
                {"id": "R3", "capabilities": ["C2", "C5"],
                 "duration_range": [10, 10], "registered_at_start": True},
            ],
        )
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(3)
        rq = sim.requests_manager.requests["Rq1"]
        assert rq.status is RequestStatus.FAILED
        assert rq.failure.describe() == "PlanFeedbackTimeout"

    def test_stale_success_after_timeout_is_dropped(self):
        sim = make_sim(
            duration=60,
            timeouts={"plan_feedback": 5, "task_feedback": 50},
            blueprints=[{"id": "Pb1", "tasks": [{"label": "T1", "required": ["C2"]}]}],
            robots=[
                {"id": "R1", "capabilities": ["C1", "C2", "C3", "C4"],
                 "duration_range": [10, 10], "registered_at_start": True},
                {"id": "R3", "capabilities": ["C2", "C5"],
                 "duration_range": [10, 10], "registered_at_start": True},
            ],
        )
        submit(sim, "Rq1", "Pb1", 0)
        sim.run_until(60)
        rq = sim.requests_manager.requests["Rq1"]
        assert rq.status is RequestStatus.FAILED
        assert rq.failure.describe() == "PlanFeedbackTimeout"
        # The robot finished its task at t=10; that success feedback is stale.
        assert sim.requests_manager.stale_feedback
        outcomes = sim.requestors.outcomes["requestor"]
        assert len([o for o in outcomes if o["request_id"] == "Rq1"]) == 1

    def test_feedback_cancels_timer(self, sim):
        submit(sim, "Rq1", "Pb2", 0)
        sim.run_until(30)
        assert sim.requests_manager.feedback_timer is None
        assert sim.requests_manager.requests["Rq1"].status is RequestStatus.SUCCEEDED


class TestTerminalNotification:
    def test_every_request_notified_exactly_once(self, sim):
        for i in range(1, 6):
            submit(sim, f"Rq{i}", "Pb2" if i % 2 else "PbX", 0)
        sim.run_until(30)
        outcomes = sim.requestors.outcomes["requestor"]
        by_request = {}
        for o in outcomes:
            by_request.setdefault(o["request_id"], []).append(o)
        assert set(by_request) == {f"Rq{i}" for i in range(1, 6)}
        assert all(len(v) == 1 for v in by_request.values())
