/** Hint panel logic: top-k suggested moves with their values.
 *
 * The panel is a read-only advisor.  Clicking a hint only preselects
 * cards in the table; it never submits, so the server-validation path
 * for hinted moves is identical to hand-picked ones.
 */

import type { Api } from "./api.js";
import type { Hint } from "./types.js";

export interface HintRow {
  move: string;
  value: number;
  label: string; // "MOVE  +0.123" style, value to three decimals
}

export class HintPanel {
  /** null means the service has no value net loaded; hide the panel. */
  rows: HintRow[] | null = null;

  constructor(private api: Api, public k = 3) {}

  get available(): boolean {
    return this.rows !== null;
  }

  clear(): void {
    if (this.rows !== null) this.rows = [];
  }

  async refresh(sid: string): Promise<void> {
    const reply = await this.api.hints(sid, this.k);
    if (reply === null) {
      this.rows = null;
      return;
    }
    this.rows = reply.hints.map(toRow);
  }
}

export function toRow(hint: Hint): HintRow {
  const sign = hint.value < 0 ? "" : "+";
  return {
    move: hint.move,
    value: hint.value,
    label: `${hint.move}  ${sign}${hint.value.toFixed(3)}`,
  };
}

/** The service ranks hints best first; guard that ordering so a
 * regression shows up as a visible failure, not a silent lie. */
export function nonIncreasing(hints: { value: number }[]): boolean {
  for (let i = 1; i < hints.length; i++) {
    if (hints[i].value > hints[i - 1].value + 1e-9) return false;
  }
  return true;
}
