/** Incremental parser for the control API's server-sent event stream.
 *
 * Frames arrive as `id:`/`event:`/`data:` blocks separated by blank lines
 * and may be split arbitrarily across network chunks, so the parser keeps
 * the unterminated tail as carry-over state.
 */

import type { Frame, FrameKind } from "./types.js";

export class SseParser {
  private buffer = "";

  /** Feed one chunk of text; returns every frame completed by it. */
  push(chunk: string): Frame[] {
    this.buffer += chunk;
    const frames: Frame[] = [];
    let boundary: number;
    while ((boundary = this.buffer.indexOf("\n\n")) !== -1) {
      const block = this.buffer.slice(0, boundary);
      this.buffer = this.buffer.slice(boundary + 2);
      const frame = parseBlock(block);
      if (frame !== null) {
        frames.push(frame);
      }
    }
    return frames;
  }
}

function parseBlock(block: string): Frame | null {
  let id: number | null = null;
  let kind: string | null = null;
  let data: string | null = null;
  for (const line of block.split("\n")) {
    const colon = line.indexOf(":");
    if (colon === -1) {
      continue;
    }
    const field = line.slice(0, colon);
    const value = line.slice(colon + 1).replace(/^ /, "");
    if (field === "id") {
      id = Number(value);
    } else if (field === "event") {
      kind = value;
    } else if (field === "data") {
      data = data === null ? value : `${data}\n${value}`;
    }
  }
  if (id === null || kind === null || data === null || Number.isNaN(id)) {
    return null;
  }
  return { seq: id, kind: kind as FrameKind, body: JSON.parse(data) };
}

export interface FeedHandle {
  close(): void;
}

export interface FeedOptions {
  /** Resume after this sequence number; -1 replays from the start. */
  since?: number;
  onFrame(frame: Frame): void;
  onStatus?(connected: boolean): void;
  /** Delay before reconnecting after a drop, in milliseconds. */
  retryMs?: number;
  fetchFn?: typeof fetch;
}

/** Long-lived feed subscription with cursor-based reconnection. */
export function openFeed(baseUrl: string, options: FeedOptions): FeedHandle {
  const fetchFn = options.fetchFn ?? fetch;
  const retryMs = options.retryMs ?? 1000;
  let cursor = options.since ?? -1;
  let closed = false;
  let controller: AbortController | null = null;
  let retryTimer: ReturnType<typeof setTimeout> | null = null;

  const connect = async (): Promise<void> => {
    controller = new AbortController();
    try {
      const response = await fetchFn(
        `${baseUrl}/events?since=${cursor}&follow=true`,
        { signal: controller.signal },
      );
      if (!response.ok || response.body === null) {
        throw new Error(`event stream failed: ${response.status}`);
      }
      options.onStatus?.(true);
      const parser = new SseParser();
      const decoder = new TextDecoder();
      const reader = response.body.getReader();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
          cursor = frame.seq;
          options.onFrame(frame);
        }
      }
    } catch {
      // fall through to the retry path
    }
    options.onStatus?.(false);
    if (!closed) {
      retryTimer = setTimeout(connect, retryMs);
    }
  };

  void connect();
  return {
    close() {
      closed = true;
      if (retryTimer !== null) {
        clearTimeout(retryTimer);
      }
      controller?.abort();
    },
  };
}
