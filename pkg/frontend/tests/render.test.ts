import { describe, expect, it } from "vitest";

import { polylineRuns, seriesMax } from "../src/charts.js";
import { renderApp } from "../src/render.js";
import type { SnapshotDoc } from "../src/types.js";
import { applyConnection, applyMetrics, applySnapshot, initialViewModel } from "../src/viewmodel.js";

const SNAPSHOT: SnapshotDoc = {
  clock: 4,
  duration: 30,
  queue: [
    {
      id: "Rq1",
      requestor: "requestor",
      blueprint_id: "PbX",
      arrival_time: 0,
      status: "Failed",
      start_time: 0,
      end_time: 0,
      failure: "NoBlueprintMatch",
    },
  ],
  in_flight: "Rq2",
  blueprints: [
    { id: "Pb2", tasks: [{ label: "T1", required: ["C1", "C3", "C4"] }] },
  ],
  robots: [
    {
      id: "R1",
      capabilities: ["C1", "C2", "C3", "C4"],
      history: 9,
      state: "Controlled",
      current_task: "T1",
      pending_deregister: true,
    },
    {
      id: "R3",
      capabilities: ["C2", "C5"],
      history: 11,
      state: "Idle",
      current_task: null,
      pending_deregister: false,
    },
  ],
  active_plan: {
    plan: {
      plan_id: "P2",
      request_id: "Rq2",
      assignments: [
        { task: { label: "T1", required: ["C1", "C3", "C4"] }, robot_id: "R1" },
        { task: { label: "T2", required: ["C2"] }, robot_id: "R1" },
        { task: { label: "T3", required: ["C2", "C5"] }, robot_id: "R3" },
      ],
    },
    cursor: 0,
  },
  latest_tick: null,
  dead_letters: 0,
  paused: true,
};

function connectedVm() {
  return applyConnection(applySnapshot(initialViewModel(), SNAPSHOT), true);
}

describe("renderApp", () => {
  it("shows a stale banner and disables commands when disconnected", () => {
    const html = renderApp(applySnapshot(initialViewModel(), SNAPSHOT));
    expect(html).toContain("stale-banner");
    expect(html).toContain("disabled");
  });

  it("renders the plan assignment table from the snapshot", () => {
    const html = renderApp(connectedVm());
    expect(html).toContain("P2");
    for (const cell of ["T1", "T2", "T3"]) {
      expect(html).toContain(`<td>${cell}</td>`);
    }
    expect((html.match(/class="assigned">R1</g) ?? []).length).toBe(2);
    expect((html.match(/class="assigned">R3</g) ?? []).length).toBe(1);
  });

  it("renders failure reasons inline in the queue", () => {
    expect(renderApp(connectedVm())).toContain("Failed(NoBlueprintMatch)");
  });

  it("shows the wind-down badge for a leaving robot", () => {
    expect(renderApp(connectedVm())).toContain("leaving after task");
  });

  it("renders capability chips for every robot", () => {
    const html = renderApp(connectedVm());
    for (const cap of ["C1", "C2", "C3", "C4", "C5"]) {
      expect(html).toContain(`<span class="chip">${cap}</span>`);
    }
  });

  it("renders charts from the tick buffer", () => {
    const vm = applyMetrics(connectedVm(), [
      { tick: 0, arrived: 1, processed: 1, successful: 1, failed: 0, unprocessed: 0, latency: 0, efficiency: null },
    ]);
    const html = renderApp(vm);
    expect(html).toContain("kpi-charts");
    expect(html).toContain("<polyline");
  });
});

describe("chart geometry", () => {
  it("splits polylines at null samples instead of drawing zeros", () => {
    const runs = polylineRuns(
      [
        { x: 0, y: 1 },
        { x: 1, y: null },
        { x: 2, y: 2 },
      ],
      100,
      50,
      2,
      2,
    );
    expect(runs).toHaveLength(2);
  });

  it("ignores nulls when scaling", () => {
    expect(seriesMax([{ x: 0, y: null }, { x: 1, y: 3 }])).toBe(3);
  });
});
