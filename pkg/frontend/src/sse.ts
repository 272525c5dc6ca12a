/** Server-sent events: incremental frame parser plus a channel that
 * survives dropped connections by resyncing state and resuming the
 * stream from the last event id it saw.
 */

import type { GameEvent } from "./types.js";

export interface SseFrame {
  id: number | null;
  type: string;
  data: string;
}

/** Feed arbitrary chunk boundaries, get back completed frames. */
export class SseParser {
  private buffer = "";

  feed(chunk: string): SseFrame[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const frames: SseFrame[] = [];
    for (;;) {
      const cut = this.buffer.indexOf("\n\n");
      if (cut < 0) break;
      const block = this.buffer.slice(0, cut);
      this.buffer = this.buffer.slice(cut + 2);
      const frame = parseBlock(block);
      if (frame) frames.push(frame);
    }
    return frames;
  }
}

function parseBlock(block: string): SseFrame | null {
  let id: number | null = null;
  let type = "message";
  const data: string[] = [];
  for (const line of block.split("\n")) {
    if (line === "" || line.startsWith(":")) continue; // comment/keep-alive
    const colon = line.indexOf(":");
    const field = colon < 0 ? line : line.slice(0, colon);
    let value = colon < 0 ? "" : line.slice(colon + 1);
    if (value.startsWith(" ")) value = value.slice(1);
    if (field === "id") id = Number(value);
    else if (field === "event") type = value;
    else if (field === "data") data.push(value);
  }
  if (data.length === 0) return null;
  return { id, type, data: data.join("\n") };
}

/** Opens one streaming connection; yields text chunks until it closes. */
export type ChunkSource = (lastEventId: number | null) => AsyncIterable<string>;

/** Wire a ChunkSource to the service's events endpoint.  Resumption
 * uses the Last-Event-ID header, same as native EventSource would. */
export function fetchSource(
  base: string,
  sid: string,
  fetchFn: typeof fetch = fetch,
): ChunkSource {
  return async function* (lastEventId: number | null) {
    const headers: Record<string, string> = { Accept: "text/event-stream" };
    if (lastEventId !== null) headers["Last-Event-ID"] = String(lastEventId);
    const res = await fetchFn(`${base}/sessions/${sid}/events`, { headers });
    if (!res.ok || !res.body) throw new Error(`event stream: ${res.status}`);
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    try {
      for (;;) {
        const { done, value } = await reader.read();
        if (done) return;
        yield decoder.decode(value, { stream: true });
      }
    } finally {
      reader.cancel().catch(() => undefined);
    }
  };
}

export interface ChannelHooks {
  onEvent: (event: GameEvent) => void;
  /** Called after a drop, before resubscribing: refetch GET /state so
   * the table is correct even if resumed events were compacted away. */
  onResync?: () => Promise<void>;
}

export class EventChannel {
  lastId: number | null = null;
  private closed = false;
  private finished = false;

  constructor(
    private source: ChunkSource,
    private hooks: ChannelHooks,
    private retryMs = 500,
  ) {}

  close(): void {
    this.closed = true;
  }

  /** Pump events until the terminal frame arrives or close() is called. */
  async run(): Promise<void> {
    while (!this.closed && !this.finished) {
      const parser = new SseParser();
      try {
        for await (const chunk of this.source(this.lastId)) {
          for (const frame of parser.feed(chunk)) this.dispatch(frame);
          if (this.closed || this.finished) return;
        }
        if (this.finished || this.closed) return;
        // stream ended without a terminal event: treat as a drop
        throw new Error("stream closed early");
      } catch (err) {
        if (this.closed || this.finished) return;
        if (this.hooks.onResync) await this.hooks.onResync();
        await sleep(this.retryMs);
      }
    }
  }

  private dispatch(frame: SseFrame): void {
    if (frame.id !== null && Number.isFinite(frame.id)) this.lastId = frame.id;
    let event: GameEvent;
    try {
      event = JSON.parse(frame.data) as GameEvent;
    } catch {
      return; // not ours; ignore
    }
    if (event.type === "terminal") this.finished = true;
    this.hooks.onEvent(event);
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
