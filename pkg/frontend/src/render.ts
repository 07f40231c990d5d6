/** HTML rendering of the dashboard: three panels, clock controls, charts.
 *
 * Rendering is a pure string function of the view-model so it can be tested
 * without a DOM; main.ts owns element wiring and event delegation.
 */

import { escapeHtml, lineChartSvg, SeriesPoint } from "./charts.js";
import type { SnapshotDoc } from "./types.js";
import { robotBadge, ViewModel } from "./viewmodel.js";

export function renderApp(vm: ViewModel): string {
  const banner = vm.connected
    ? ""
    : '<div class="banner" data-testid="stale-banner">Disconnected — data may be stale; commands disabled.</div>';
  const error = vm.lastError
    ? `<div class="error" data-testid="command-error">${escapeHtml(vm.lastError)}</div>`
    : "";
  if (vm.snapshot === null) {
    return `${banner}<p>Waiting for the first snapshot…</p>`;
  }
  return [
    banner,
    error,
    renderClock(vm.snapshot, vm.connected),
    '<main class="panels">',
    renderRequestsPanel(vm.snapshot, vm.connected),
    renderPlannerPanel(vm.snapshot),
    renderRobotsPanel(vm.snapshot, vm.connected),
    "</main>",
    renderCharts(vm),
  ].join("");
}

function disabled(connected: boolean): string {
  return connected ? "" : " disabled";
}

function renderClock(snapshot: SnapshotDoc, connected: boolean): string {
  return `
<header class="clock">
  <span data-testid="clock">t = ${snapshot.clock} / ${snapshot.duration}</span>
  <span data-testid="clock-mode">${snapshot.paused ? "paused" : "running"}</span>
  <button data-command="step" data-units="1"${disabled(connected)}>Step 1</button>
  <button data-command="step" data-units="5"${disabled(connected)}>Step 5</button>
  <button data-command="run"${disabled(connected)}>Run</button>
  <button data-command="pause"${disabled(connected)}>Pause</button>
</header>`;
}

function renderRequestsPanel(snapshot: SnapshotDoc, connected: boolean): string {
  const rows = snapshot.queue
    .map((request) => {
      const status =
        request.status === "Failed" && request.failure
          ? `Failed(${request.failure})`
          : request.status;
      return (
        `<tr data-request="${escapeHtml(request.id)}">` +
        `<td>${escapeHtml(request.id)}</td>` +
        `<td>${escapeHtml(request.blueprint_id)}</td>` +
        `<td class="status">${escapeHtml(status)}</td>` +
        `<td>${request.start_time ?? ""}</td><td>${request.end_time ?? ""}</td></tr>`
      );
    })
    .join("");
  const blueprints = snapshot.blueprints
    .map(
      (bp) =>
        `<li data-blueprint="${escapeHtml(bp.id)}">` +
        `<strong>${escapeHtml(bp.id)}</strong> ` +
        bp.tasks
          .map((t) => `${escapeHtml(t.label)}:{${t.required.map(escapeHtml).join(",")}}`)
          .join(" ") +
        ` <button data-command="delete-blueprint" data-id="${escapeHtml(bp.id)}"${disabled(connected)}>delete</button></li>`,
    )
    .join("");
  return `
<section class="panel" id="requests-panel">
  <h2>Requests</h2>
  <p>in flight: <span data-testid="in-flight">${snapshot.in_flight ?? "—"}</span></p>
  <table><thead><tr><th>id</th><th>blueprint</th><th>status</th><th>start</th><th>end</th></tr></thead>
  <tbody>${rows}</tbody></table>
  <form id="submit-form">
    <input name="request_id" placeholder="request id (optional)">
    <input name="blueprint_id" placeholder="blueprint id" required>
    <button${disabled(connected)}>Submit request</button>
  </form>
  <h3>Blueprints</h3>
  <ul id="blueprint-list">${blueprints}</ul>
  <form id="blueprint-form">
    <input name="id" placeholder="blueprint id">
    <textarea name="tasks" placeholder="T1: C1, C2&#10;T2: C3"></textarea>
    <span class="field-error" data-testid="blueprint-form-error"></span>
    <button data-op="add"${disabled(connected)}>Add</button>
    <button data-op="modify"${disabled(connected)}>Modify</button>
  </form>
</section>`;
}

function renderPlannerPanel(snapshot: SnapshotDoc): string {
  const plan = snapshot.active_plan;
  const assignments = plan
    ? plan.plan.assignments
        .map(
          (assignment, index) =>
            `<tr class="${index === plan.cursor ? "current" : ""}">` +
            `<td>${escapeHtml(assignment.task.label)}</td>` +
            `<td>{${assignment.task.required.map(escapeHtml).join(",")}}</td>` +
            `<td class="assigned">${escapeHtml(assignment.robot_id)}</td></tr>`,
        )
        .join("")
    : "";
  const capabilities = snapshot.robots
    .map(
      (robot) =>
        `<tr><td>${escapeHtml(robot.id)}</td>` +
        `<td>${robot.capabilities.map((c) => `<span class="chip">${escapeHtml(c)}</span>`).join("")}</td>` +
        `<td>${robot.history}</td></tr>`,
    )
    .join("");
  return `
<section class="panel" id="planner-panel">
  <h2>Planner</h2>
  <p>active plan: <span data-testid="plan-id">${plan ? escapeHtml(plan.plan.plan_id) : "—"}</span></p>
  <table id="plan-table"><thead><tr><th>task</th><th>required</th><th>robot</th></tr></thead>
  <tbody>${assignments}</tbody></table>
  <h3>Capabilities &amp; histories</h3>
  <table><thead><tr><th>robot</th><th>capabilities</th><th>history</th></tr></thead>
  <tbody>${capabilities}</tbody></table>
</section>`;
}

function renderRobotsPanel(snapshot: SnapshotDoc, connected: boolean): string {
  const rows = snapshot.robots
    .map((robot) => {
      const registered = robot.state !== "Unregistered";
      const action = registered
        ? `<button data-command="deregister" data-id="${escapeHtml(robot.id)}"${disabled(connected)}>deregister</button>`
        : `<button data-command="register" data-id="${escapeHtml(robot.id)}"${disabled(connected)}>register</button>`;
      return (
        `<tr data-robot="${escapeHtml(robot.id)}">` +
        `<td>${escapeHtml(robot.id)}</td>` +
        `<td class="badge state-${robot.state}">${escapeHtml(robotBadge(robot))}</td>` +
        `<td>${robot.current_task ? escapeHtml(robot.current_task) : ""}</td>` +
        `<td>${action}</td></tr>`
      );
    })
    .join("");
  return `
<section class="panel" id="robots-panel">
  <h2>Robots</h2>
  <table><thead><tr><th>id</th><th>state</th><th>task</th><th></th></tr></thead>
  <tbody>${rows}</tbody></table>
  <p>dead letters: ${snapshot.dead_letters}</p>
</section>`;
}

function renderCharts(vm: ViewModel): string {
  const points = (pick: (tick: (typeof vm.ticks)[number]) => number | null): SeriesPoint[] =>
    vm.ticks
      .filter((sample) => sample !== undefined)
      .map((sample) => ({ x: sample.tick, y: pick(sample) }));
  const horizon = vm.snapshot ? vm.snapshot.duration - 1 : 1;
  return `
<section class="charts" id="kpi-charts">
  ${lineChartSvg("processed / tick", points((t) => t.processed), horizon)}
  ${lineChartSvg("latency", points((t) => t.latency), horizon)}
  ${lineChartSvg("efficiency", points((t) => t.efficiency), horizon)}
  ${lineChartSvg("unprocessed", points((t) => t.unprocessed), horizon)}
</section>`;
}
