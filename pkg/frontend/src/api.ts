/** Thin typed client for the four control API endpoints. */

import type { Command, CommandAck, SnapshotDoc, TickSampleDoc } from "./types.js";

export class CommandRejected extends Error {
  constructor(public readonly reason: string) {
    super(reason);
    this.name = "CommandRejected";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async getState(): Promise<SnapshotDoc> {
    const response = await this.fetchFn(`${this.baseUrl}/state`);
    if (!response.ok) {
      throw new Error(`GET /state failed: ${response.status}`);
    }
    return (await response.json()) as SnapshotDoc;
  }

  async getMetrics(from?: number, to?: number): Promise<TickSampleDoc[]> {
    const params = new URLSearchParams();
    if (from !== undefined) {
      params.set("from", String(from));
    }
    if (to !== undefined) {
      params.set("to", String(to));
    }
    const query = params.toString();
    const response = await this.fetchFn(
      `${this.baseUrl}/metrics${query ? `?${query}` : ""}`,
    );
    if (!response.ok) {
      throw new Error(`GET /metrics failed: ${response.status}`);
    }
    const doc = (await response.json()) as { samples: TickSampleDoc[] };
    return doc.samples;
  }

  /** Post a command; rejection surfaces the server's reason verbatim. */
  async postCommand(command: Command): Promise<CommandAck> {
    const response = await this.fetchFn(`${this.baseUrl}/commands`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(command),
    });
    if (response.status === 400) {
      const body = (await response.json()) as { reason?: string; detail?: string };
      throw new CommandRejected(body.reason ?? body.detail ?? "rejected");
    }
    if (!response.ok) {
      throw new Error(`POST /commands failed: ${response.status}`);
    }
    return (await response.json()) as CommandAck;
  }
}
