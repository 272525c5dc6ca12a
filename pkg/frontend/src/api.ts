/** Typed client for the game service plus a message trace.
 *
 * Every payload that reaches the client in live mode flows through the
 * trace, so tests (and the paranoid) can audit the full wire history
 * for hidden-hand leakage instead of trusting the renderer.
 */

import type {
  HintsReply, LegalReply, ReplayReply, SessionState,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service replied ${status}: ${JSON.stringify(detail)}`);
  }

  /** The legal-move echo attached to 422 move rejections, if any. */
  legalEcho(): string[] | null {
    if (
      typeof this.detail === "object" && this.detail !== null &&
      Array.isArray((this.detail as { legal?: unknown }).legal)
    ) {
      return (this.detail as { legal: string[] }).legal;
    }
    return null;
  }
}

export interface TracedMessage {
  url: string;
  body: string;
}

export class MessageTrace {
  messages: TracedMessage[] = [];

  record(url: string, body: string): void {
    this.messages.push({ url, body });
  }

  /** Live-mode firewall audit: no payload may carry a face-up `hands`
   * array; only the player's own `hand` and opponent counts travel. */
  hiddenHandViolations(): TracedMessage[] {
    return this.messages.filter((m) => {
      try {
        const parsed = JSON.parse(m.body);
        return parsed !== null && typeof parsed === "object" &&
          "hands" in parsed;
      } catch {
        return false;
      }
    });
  }
}

type FetchLike = typeof fetch;

export interface CreateSessionBody {
  human_seat?: number | null;
  seed?: number;
  bidding?: boolean;
  bots?: Record<string, string>;
}

export class Api {
  constructor(
    private base: string,
    private fetchFn: FetchLike = fetch,
    public trace: MessageTrace | null = null,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body !== undefined
        ? { "content-type": "application/json" }
        : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await res.text();
    this.trace?.record(path, text);
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = text;
    }
    if (!res.ok) {
      const detail = (parsed as { detail?: unknown })?.detail ?? parsed;
      throw new ServiceError(res.status, detail);
    }
    return parsed as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionState> {
    return this.request("POST", "/sessions", body);
  }

  state(sid: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${sid}/state`);
  }

  legal(sid: string): Promise<LegalReply> {
    return this.request("GET", `/sessions/${sid}/legal`);
  }

  move(sid: string, body: { move: string } | { bid: boolean }):
    Promise<SessionState> {
    return this.request("POST", `/sessions/${sid}/move`, body);
  }

  /** null when the service has no value network to rank moves with. */
  async hints(sid: string, k = 3): Promise<HintsReply | null> {
    try {
      return await this.request("GET", `/sessions/${sid}/hints?k=${k}`);
    } catch (err) {
      if (err instanceof ServiceError && err.status === 404) return null;
      throw err;
    }
  }

  async log(sid: string): Promise<string> {
    const reply = await this.request<{ log: string }>(
      "GET", `/sessions/${sid}/log`);
    return reply.log;
  }

  replay(log: string): Promise<ReplayReply> {
    return this.request("POST", "/replay", { log });
  }
}
