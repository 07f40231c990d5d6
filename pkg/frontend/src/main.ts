/** Browser bootstrap: one rendering loop fed by snapshots and the event
 * stream; every user action becomes a POST /commands call. */

import { ApiClient, CommandRejected } from "./api.js";
import { renderApp } from "./render.js";
import { openFeed } from "./sse.js";
import type { Command } from "./types.js";
import {
  applyConnection,
  applyError,
  applyFrame,
  applyMetrics,
  applySnapshot,
  initialViewModel,
  parseBlueprintForm,
  ViewModel,
} from "./viewmodel.js";

const baseUrl = (window as { MRSIM_API_URL?: string }).MRSIM_API_URL ?? "";
const api = new ApiClient(baseUrl);
const root = document.getElementById("app")!;

let vm: ViewModel = initialViewModel();

function update(next: ViewModel): void {
  if (next === vm) {
    return;
  }
  vm = next;
  root.innerHTML = renderApp(vm);
}

async function refreshSnapshot(): Promise<void> {
  try {
    const snapshot = await api.getState();
    const samples = await api.getMetrics();
    update(applyMetrics(applySnapshot(vm, snapshot), samples));
  } catch (error) {
    update(applyError(vm, String(error)));
  }
}

async function send(command: Command): Promise<void> {
  if (!vm.connected) {
    return;
  }
  try {
    await api.postCommand(command);
    update(applyError(vm, null));
  } catch (error) {
    update(applyError(vm, error instanceof CommandRejected ? error.reason : String(error)));
  }
  await refreshSnapshot();
}

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const command = target.dataset.command;
  if (command === undefined) {
    return;
  }
  event.preventDefault();
  if (command === "step") {
    void send({ kind: "StepClock", units: Number(target.dataset.units ?? "1") });
  } else if (command === "run") {
    void send({ kind: "RunClock" });
  } else if (command === "pause") {
    void send({ kind: "PauseClock" });
  } else if (command === "register") {
    void send({ kind: "RegisterRobot", robot_id: target.dataset.id! });
  } else if (command === "deregister") {
    void send({ kind: "DeregisterRobot", robot_id: target.dataset.id! });
  } else if (command === "delete-blueprint") {
    void send({ kind: "DeleteBlueprint", blueprint_id: target.dataset.id! });
  }
});

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  event.preventDefault();
  if (form.id === "submit-form") {
    const data = new FormData(form);
    const requestId = String(data.get("request_id") ?? "").trim();
    void send({
      kind: "SubmitRequest",
      blueprint_id: String(data.get("blueprint_id") ?? ""),
      ...(requestId ? { request_id: requestId } : {}),
    });
  } else if (form.id === "blueprint-form") {
    const data = new FormData(form);
    const parsed = parseBlueprintForm(
      String(data.get("id") ?? ""),
      String(data.get("tasks") ?? ""),
    );
    const errorSlot = form.querySelector(".field-error");
    if ("errors" in parsed) {
      if (errorSlot !== null) {
        errorSlot.textContent = parsed.errors.map((e) => e.message).join("; ");
      }
      return; // invalid input never leaves the client
    }
    const op = (event as SubmitEvent).submitter?.dataset.op ?? "add";
    void send({
      kind: op === "modify" ? "ModifyBlueprint" : "AddBlueprint",
      blueprint: parsed.blueprint,
    });
  }
});

openFeed(baseUrl, {
  onFrame(frame) {
    update(applyFrame(vm, frame));
  },
  onStatus(connected) {
    update(applyConnection(vm, connected));
    if (connected) {
      void refreshSnapshot();
    }
  },
});

void refreshSnapshot();
