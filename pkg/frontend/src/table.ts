/** Live table controller: one session, one human seat.
 *
 * All game truth comes from service payloads; the client's only private
 * state is which cards are currently raised.  Selection never submits
 * unless it matches a token from the service's legal list, and the view
 * only changes when a server reply or event-channel refresh lands, so
 * there is nothing optimistic to roll back.
 */

import type { Api } from "./api.js";
import { Card, canonical, cardsOf, isSubset, sortCards, tokenOf } from "./cards.js";
import type { CreateSessionBody } from "./api.js";
import type { SessionState } from "./types.js";

export class LiveTable {
  view: SessionState | null = null;
  legal: string[] = [];
  selection: Card[] = [];

  constructor(private api: Api) {}

  get sid(): string {
    if (!this.view) throw new Error("no session");
    return this.view.session_id;
  }

  hand(): Card[] {
    return cardsOf(this.view?.hand ?? "");
  }

  myTurn(): boolean {
    return this.view !== null && this.view.winner === null &&
      this.view.to_move === this.view.your_seat &&
      this.view.your_seat !== null;
  }

  bidding(): boolean {
    return this.view?.phase === "bidding";
  }

  async start(body: CreateSessionBody): Promise<void> {
    this.applyState(await this.api.createSession(body));
  }

  async refresh(): Promise<void> {
    this.applyState(await this.api.state(this.sid));
  }

  /** Install a fresh server payload and resync selection + legal. */
  applyState(state: SessionState): void {
    this.view = state;
    this.legal = [];
    // raised cards that left the hand (our move landed) drop silently
    if (!isSubset(this.selection, this.hand())) this.selection = [];
  }

  async refreshLegal(): Promise<void> {
    if (!this.myTurn()) {
      this.legal = [];
      return;
    }
    const reply = await this.api.legal(this.sid);
    this.legal = reply.bidding ? [] : reply.moves;
  }

  // ----- selection ------------------------------------------------

  toggle(card: Card): void {
    const i = this.selection.indexOf(card);
    if (i >= 0) {
      this.selection.splice(i, 1);
      return;
    }
    const next = sortCards([...this.selection, card]);
    if (!isSubset(next, this.hand())) return; // not holding another copy
    this.selection = next;
  }

  clearSelection(): void {
    this.selection = [];
  }

  /** Pre-select the cards of a hint or legal token (tap convenience). */
  preselect(token: string): boolean {
    if (token === "P") {
      this.selection = [];
      return true;
    }
    const cards = cardsOf(token);
    if (!isSubset(cards, this.hand())) return false;
    this.selection = cards;
    return true;
  }

  /** Empty selection maps to Pass; otherwise the canonical token. */
  selectedToken(): string {
    return tokenOf(this.selection);
  }

  /** Pre-validation for the play button: the service's list decides. */
  canPlay(): boolean {
    if (!this.myTurn() || this.legal.length === 0) return false;
    const token = this.selectedToken();
    return this.legal.some((m) => canonical(m) === token);
  }

  canPass(): boolean {
    return this.myTurn() && this.legal.includes("P");
  }

  /** Submit the current selection.  Refuses locally invalid selections
   * so every request that leaves the client is already server-shaped;
   * the server still has the final word. */
  async submit(): Promise<SessionState> {
    if (!this.canPlay()) throw new Error("selection is not a legal move");
    const state = await this.api.move(this.sid, {
      move: this.selectedToken(),
    });
    this.applyState(state);
    return state;
  }

  async pass(): Promise<SessionState> {
    this.clearSelection();
    return this.submit();
  }

  async submitBid(bid: boolean): Promise<SessionState> {
    if (!this.bidding()) throw new Error("not bidding");
    const state = await this.api.move(this.sid, { bid });
    this.applyState(state);
    return state;
  }
}
