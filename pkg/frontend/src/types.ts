/** Server payload shapes, mirroring the control API field-for-field. */

export type RobotState = "Unregistered" | "Idle" | "Controlled";

export type RequestStatus = "Queued" | "InProgress" | "Succeeded" | "Failed";

export interface TaskDoc {
  label: string;
  required: string[];
}

export interface BlueprintDoc {
  id: string;
  tasks: TaskDoc[];
}

export interface RequestDoc {
  id: string;
  requestor: string;
  blueprint_id: string;
  arrival_time: number;
  status: RequestStatus;
  start_time: number | null;
  end_time: number | null;
  failure: string | null;
}

export interface RobotDoc {
  id: string;
  capabilities: string[];
  history: number;
  state: RobotState;
  current_task: string | null;
  pending_deregister: boolean;
}

export interface AssignmentDoc {
  task: TaskDoc;
  robot_id: string;
}

export interface PlanDoc {
  plan_id: string;
  request_id: string;
  assignments: AssignmentDoc[];
}

export interface ActivePlanDoc {
  plan: PlanDoc;
  cursor: number;
}

export interface TickSampleDoc {
  tick: number;
  arrived: number;
  processed: number;
  successful: number;
  failed: number;
  unprocessed: number;
  latency: number | null;
  efficiency: number | null;
}

export interface SnapshotDoc {
  clock: number;
  duration: number;
  queue: RequestDoc[];
  in_flight: string | null;
  blueprints: BlueprintDoc[];
  robots: RobotDoc[];
  active_plan: ActivePlanDoc | null;
  latest_tick: TickSampleDoc | null;
  dead_letters: number;
  paused: boolean;
}

export interface TransitionDoc {
  robot_id: string;
  from: RobotState | null;
  to: RobotState;
  at: number;
}

export type FrameKind = "event" | "transition" | "tick";

export interface Frame {
  seq: number;
  kind: FrameKind;
  body: Record<string, unknown>;
}

export interface CommandAck {
  command_id: string;
  applied_at: number;
}

export type Command =
  | { kind: "SubmitRequest"; blueprint_id: string; request_id?: string; requestor?: string }
  | { kind: "AddBlueprint"; blueprint: BlueprintDoc }
  | { kind: "ModifyBlueprint"; blueprint: BlueprintDoc }
  | { kind: "DeleteBlueprint"; blueprint_id: string }
  | { kind: "RegisterRobot"; robot_id: string; capabilities?: string[] }
  | { kind: "DeregisterRobot"; robot_id: string }
  | { kind: "StepClock"; units: number }
  | { kind: "RunClock"; until?: number }
  | { kind: "PauseClock" };
