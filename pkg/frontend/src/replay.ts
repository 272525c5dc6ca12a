/** Replay viewer: steps through an exported match log.
 *
 * The log is validated and expanded by the service's replay endpoint,
 * so the client never interprets moves itself; it just walks the
 * returned step list.  In replays every hand is face up by design.
 */

import { Api, ServiceError } from "./api.js";
import type { ReplayReply, ReplayStep } from "./types.js";

export class ReplayViewer {
  reply: ReplayReply | null = null;
  error: string | null = null;
  /** Number of moves applied, 0 .. steps.length. */
  index = 0;

  constructor(private api: Api) {}

  async load(log: string): Promise<boolean> {
    this.reply = null;
    this.error = null;
    this.index = 0;
    try {
      this.reply = await this.api.replay(log.trim());
      return true;
    } catch (err) {
      if (err instanceof ServiceError && err.status === 422) {
        this.error = String(err.detail);
        return false;
      }
      throw err;
    }
  }

  get loaded(): boolean {
    return this.reply !== null;
  }

  get length(): number {
    return this.reply?.steps.length ?? 0;
  }

  get atStart(): boolean {
    return this.index === 0;
  }

  get atEnd(): boolean {
    return this.index === this.length;
  }

  /** Step forward; no-op at the last move (returns false). */
  forward(): boolean {
    if (!this.reply || this.atEnd) return false;
    this.index += 1;
    return true;
  }

  /** Step back; no-op at the deal (returns false). */
  back(): boolean {
    if (!this.reply || this.atStart) return false;
    this.index -= 1;
    return true;
  }

  toStart(): void {
    this.index = 0;
  }

  toEnd(): void {
    this.index = this.length;
  }

  /** Hands after `index` moves; seat i holds role "LDU"[i]. */
  hands(): [string, string, string] {
    if (!this.reply) return ["", "", ""];
    if (this.index === 0) return [...this.reply.hands] as [string, string, string];
    const after = this.reply.steps[this.index - 1].hands_after;
    return [...after] as [string, string, string];
  }

  lastStep(): ReplayStep | null {
    if (!this.reply || this.index === 0) return null;
    return this.reply.steps[this.index - 1];
  }

  /** Result banner, only once the viewer has walked to the end. */
  banner(): string | null {
    if (!this.reply || !this.atEnd) return null;
    const r = this.reply;
    const who = r.winner === "landlord" ? "Landlord wins" : "Peasants win";
    const pts = r.landlord_points >= 0
      ? `+${r.landlord_points}`
      : String(r.landlord_points);
    const bombs = r.bombs === 1 ? "1 bomb" : `${r.bombs} bombs`;
    return `${who} (landlord ${pts}, ${bombs})`;
  }
}
