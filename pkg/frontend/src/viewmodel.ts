/** Pure view-model: a fold over (snapshot, event frames).
 *
 * The UI renders only what the server sent. Frames patch the last snapshot
 * between refreshes (robot states from transitions, tick samples into the
 * rolling buffer); no KPI is computed client-side.
 */

import type {
  Frame,
  RobotDoc,
  SnapshotDoc,
  TickSampleDoc,
  TransitionDoc,
} from "./types.js";

export interface ViewModel {
  snapshot: SnapshotDoc | null;
  /** Finalized tick samples, indexed by tick number. */
  ticks: TickSampleDoc[];
  connected: boolean;
  lastSeq: number;
  lastError: string | null;
}

export function initialViewModel(): ViewModel {
  return { snapshot: null, ticks: [], connected: false, lastSeq: -1, lastError: null };
}

export function applySnapshot(vm: ViewModel, snapshot: SnapshotDoc): ViewModel {
  return { ...vm, snapshot };
}

export function applyMetrics(vm: ViewModel, samples: TickSampleDoc[]): ViewModel {
  const ticks = vm.ticks.slice();
  for (const sample of samples) {
    ticks[sample.tick] = sample;
  }
  return { ...vm, ticks };
}

export function applyConnection(vm: ViewModel, connected: boolean): ViewModel {
  if (connected === vm.connected) {
    return vm;
  }
  return { ...vm, connected };
}

export function applyError(vm: ViewModel, message: string | null): ViewModel {
  return { ...vm, lastError: message };
}

export function applyFrame(vm: ViewModel, frame: Frame): ViewModel {
  if (frame.seq <= vm.lastSeq) {
    return vm; // duplicate delivery after a reconnect race
  }
  const next: ViewModel = { ...vm, lastSeq: frame.seq };
  if (frame.kind === "tick") {
    const sample = frame.body as unknown as TickSampleDoc;
    const ticks = next.ticks.slice();
    ticks[sample.tick] = sample;
    next.ticks = ticks;
  } else if (frame.kind === "transition" && next.snapshot !== null) {
    const transition = frame.body as unknown as TransitionDoc;
    next.snapshot = {
      ...next.snapshot,
      robots: next.snapshot.robots.map((robot) =>
        robot.id === transition.robot_id ? { ...robot, state: transition.to } : robot,
      ),
    };
  }
  return next;
}

/** Human-readable state badge, including the wind-down special case. */
export function robotBadge(robot: RobotDoc): string {
  if (robot.pending_deregister && robot.state === "Controlled") {
    return "leaving after task";
  }
  return robot.state;
}

export interface BlueprintFormError {
  field: string;
  message: string;
}

/** Parse the blueprint editor's line format: one `label: C1, C2` per line.
 * Mirrors the server's validation so bad input never leaves the client. */
export function parseBlueprintForm(
  id: string,
  tasksText: string,
): { blueprint: { id: string; tasks: { label: string; required: string[] }[] } } | { errors: BlueprintFormError[] } {
  const errors: BlueprintFormError[] = [];
  if (!id.trim()) {
    errors.push({ field: "id", message: "blueprint id must be non-empty" });
  }
  const tasks: { label: string; required: string[] }[] = [];
  const seen = new Set<string>();
  const lines = tasksText
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (lines.length === 0) {
    errors.push({ field: "tasks", message: "empty task list" });
  }
  for (const line of lines) {
    const colon = line.indexOf(":");
    if (colon === -1) {
      errors.push({ field: "tasks", message: `missing ':' in "${line}"` });
      continue;
    }
    const label = line.slice(0, colon).trim();
    if (!label) {
      errors.push({ field: "tasks", message: `missing task label in "${line}"` });
      continue;
    }
    if (seen.has(label)) {
      errors.push({ field: "tasks", message: `duplicate task label ${label}` });
    }
    seen.add(label);
    const tokens = line
      .slice(colon + 1)
      .split(",")
      .map((token) => token.trim());
    const required: string[] = [];
    for (const token of tokens) {
      if (!/^[A-Za-z][A-Za-z0-9_-]*$/.test(token)) {
        errors.push({
          field: "tasks",
          message: `malformed capability token "${token}" in task ${label}`,
        });
        continue;
      }
      required.push(token);
    }
    if (required.length === 0 && tokens.every((t) => t === "")) {
      errors.push({ field: "tasks", message: `task ${label} requires no capabilities` });
    }
    tasks.push({ label, required });
  }
  if (errors.length > 0) {
    return { errors };
  }
  return { blueprint: { id: id.trim(), tasks } };
}
