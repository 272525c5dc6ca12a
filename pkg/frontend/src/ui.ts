/** DOM layer.  Builds the page skeleton once, then re-renders regions
 * from controller state on demand.  No game logic lives here: every
 * enabled/disabled decision is delegated to the table controller,
 * which in turn defers to the service's legal list.
 */

import type { Card } from "./cards.js";
import { cardsOf } from "./cards.js";
import type { HintPanel } from "./hints.js";
import type { LiveTable } from "./table.js";
import type { ReplayViewer } from "./replay.js";

export type Mode = "play" | "replay";

export interface UiHandlers {
  onNewGame(opts: { seat: number; bidding: boolean; seed: number | null }): void;
  onToggleCard(card: Card): void;
  onPlay(): void;
  onPass(): void;
  onClear(): void;
  onBid(wants: boolean): void;
  onHint(move: string): void;
  onExportLog(): void;
  onLoadReplay(text: string): void;
  onReplayStep(where: "start" | "back" | "forward" | "end"): void;
}

const ROLE_OF_SEAT = (landlord: number | null, seat: number): string => {
  if (landlord === null) return "?";
  return "LDU"[(seat - landlord + 3) % 3];
};

export class Ui {
  mode: Mode = "play";

  private seats: HTMLElement[] = [];
  private toBeat!: HTMLElement;
  private bombs!: HTMLElement;
  private status!: HTMLElement;
  private notice!: HTMLElement;
  private historyBox!: HTMLElement;
  private bidBar!: HTMLElement;
  private hintBox!: HTMLElement;
  private handBox!: HTMLElement;
  private playBtn!: HTMLButtonElement;
  private passBtn!: HTMLButtonElement;
  private clearBtn!: HTMLButtonElement;
  private exportBtn!: HTMLButtonElement;
  private logOut!: HTMLTextAreaElement;
  private playSection!: HTMLElement;
  private replaySection!: HTMLElement;
  private replayIn!: HTMLTextAreaElement;
  private replayError!: HTMLElement;
  private replayHands: HTMLElement[] = [];
  private replayStatus!: HTMLElement;
  private tabs: HTMLButtonElement[] = [];
  baseInput!: HTMLInputElement;
  private seatSelect!: HTMLSelectElement;
  private biddingCheck!: HTMLInputElement;
  private seedInput!: HTMLInputElement;

  constructor(private root: HTMLElement, private handlers: UiHandlers) {
    this.build();
    this.bindKeys();
  }

  // ----- skeleton -------------------------------------------------

  private build(): void {
    const h = this.handlers;
    const header = el("header", "topbar");
    header.append(el("h1", "", "Dou Dizhu"));

    const form = el("div", "newgame");
    this.baseInput = input("text", "http://127.0.0.1:8000");
    this.baseInput.title = "service base URL";
    this.seatSelect = document.createElement("select");
    for (const [value, label] of [["0", "Seat 0"], ["1", "Seat 1"], ["2", "Seat 2"]]) {
      const opt = document.createElement("option");
      opt.value = value;
      opt.textContent = label;
      this.seatSelect.append(opt);
    }
    this.biddingCheck = input("checkbox", "");
    const bidLabel = el("label", "", " bid for landlord");
    bidLabel.prepend(this.biddingCheck);
    this.seedInput = input("text", "");
    this.seedInput.placeholder = "seed (optional)";
    this.seedInput.size = 10;
    const newBtn = button("New game", () => {
      const raw = this.seedInput.value.trim();
      h.onNewGame({
        seat: Number(this.seatSelect.value),
        bidding: this.biddingCheck.checked,
        seed: raw === "" ? null : Number(raw),
      });
    });
    form.append(this.baseInput, this.seatSelect, bidLabel, this.seedInput, newBtn);
    header.append(form);

    const tabBar = el("nav", "tabs");
    for (const mode of ["play", "replay"] as Mode[]) {
      const tab = button(mode === "play" ? "Table" : "Replay", () => {
        this.mode = mode;
        this.syncMode();
      });
      this.tabs.push(tab);
      tabBar.append(tab);
    }
    header.append(tabBar);
    this.root.append(header);

    // live table
    this.playSection = el("section", "play");
    const oppRow = el("div", "opponents");
    for (let i = 0; i < 3; i++) {
      const panel = el("div", "seat");
      this.seats.push(panel);
    }
    oppRow.append(...this.seats.slice(1));
    this.playSection.append(oppRow);

    const center = el("div", "center");
    this.toBeat = el("div", "tobeat");
    this.bombs = el("div", "bombs");
    this.status = el("div", "status");
    this.notice = el("div", "notice");
    center.append(this.toBeat, this.bombs, this.status, this.notice);
    this.playSection.append(center);

    this.historyBox = el("div", "history");
    this.playSection.append(this.historyBox);

    this.bidBar = el("div", "bidbar");
    this.bidBar.append(
      button("Bid landlord", () => h.onBid(true)),
      button("Pass bid", () => h.onBid(false)),
    );
    this.playSection.append(this.bidBar);

    this.hintBox = el("div", "hints");
    this.playSection.append(this.hintBox);

    this.playSection.append(this.seats[0]);
    this.handBox = el("div", "hand");
    this.playSection.append(this.handBox);

    const controls = el("div", "controls");
    this.playBtn = button("Play", () => h.onPlay());
    this.passBtn = button("Pass", () => h.onPass());
    this.clearBtn = button("Clear", () => h.onClear());
    this.exportBtn = button("Export log", () => h.onExportLog());
    controls.append(this.playBtn, this.passBtn, this.clearBtn, this.exportBtn);
    this.playSection.append(controls);

    this.logOut = document.createElement("textarea");
    this.logOut.readOnly = true;
    this.logOut.rows = 3;
    this.logOut.className = "logout";
    this.playSection.append(this.logOut);
    this.root.append(this.playSection);

    // replay viewer
    this.replaySection = el("section", "replay");
    this.replayIn = document.createElement("textarea");
    this.replayIn.rows = 3;
    this.replayIn.placeholder = "paste a match log";
    const loadBtn = button("Load", () => h.onLoadReplay(this.replayIn.value));
    this.replayError = el("div", "error");
    const rHands = el("div", "rhands");
    for (let i = 0; i < 3; i++) {
      const panel = el("div", "seat faceup");
      this.replayHands.push(panel);
      rHands.append(panel);
    }
    const rControls = el("div", "controls");
    rControls.append(
      button("|<", () => h.onReplayStep("start")),
      button("<", () => h.onReplayStep("back")),
      button(">", () => h.onReplayStep("forward")),
      button(">|", () => h.onReplayStep("end")),
    );
    this.replayStatus = el("div", "status");
    this.replaySection.append(this.replayIn, loadBtn, this.replayError,
                              rHands, rControls, this.replayStatus);
    this.root.append(this.replaySection);
    this.syncMode();
  }

  private bindKeys(): void {
    document.addEventListener("keydown", (ev) => {
      const target = ev.target as HTMLElement | null;
      if (target && (target.tagName === "TEXTAREA" || target.tagName === "INPUT")) return;
      if (this.mode !== "play") return;
      if (ev.key === "Enter" && !this.playBtn.disabled) this.handlers.onPlay();
      else if ((ev.key === "p" || ev.key === "P") && !this.passBtn.disabled) {
        this.handlers.onPass();
      } else if (ev.key === "Escape") this.handlers.onClear();
      else return;
      ev.preventDefault();
    });
  }

  private syncMode(): void {
    this.playSection.style.display = this.mode === "play" ? "" : "none";
    this.replaySection.style.display = this.mode === "replay" ? "" : "none";
    this.tabs[0].classList.toggle("active", this.mode === "play");
    this.tabs[1].classList.toggle("active", this.mode === "replay");
  }

  setLog(text: string): void {
    this.logOut.value = text;
  }

  /** Inline feedback line, used for server move rejections. */
  setNotice(text: string): void {
    this.notice.textContent = text;
  }

  // ----- live table render ----------------------------------------

  render(table: LiveTable, hints: HintPanel): void {
    const view = table.view;
    for (const panel of this.seats) panel.replaceChildren();
    this.historyBox.replaceChildren();
    this.hintBox.replaceChildren();
    this.handBox.replaceChildren();
    if (!view) {
      this.status.textContent = "No session. Start a new game.";
      this.toBeat.textContent = "";
      this.bombs.textContent = "";
      this.bidBar.style.display = "none";
      this.playBtn.disabled = this.passBtn.disabled = true;
      this.clearBtn.disabled = this.exportBtn.disabled = true;
      return;
    }

    const you = view.your_seat;
    for (let seat = 0; seat < 3; seat++) {
      // your seat in the bottom slot, the next seat to act on the left
      const slot = you === null ? seat : (seat - you + 3) % 3;
      renderSeat(this.seats[slot], view, seat, you);
    }

    for (const entry of view.history ?? []) {
      this.historyBox.append(el("div", "move",
        `${entry.role} ${entry.seat}: ${entry.move}`));
    }
    this.historyBox.scrollTop = this.historyBox.scrollHeight;

    this.toBeat.textContent = view.to_beat ? `to beat: ${view.to_beat}` : "free lead";
    this.bombs.textContent = `bombs: ${view.bombs} (stake x${2 ** view.bombs})`;

    if (view.winner) {
      const pts = view.landlord_points ?? 0;
      const shown = pts >= 0 ? `+${pts}` : String(pts);
      this.status.textContent =
        `${view.winner === "landlord" ? "Landlord wins" : "Peasants win"} (landlord ${shown})`;
    } else if (view.phase === "bidding") {
      this.status.textContent = table.myTurn()
        ? "Your call: bid for landlord?"
        : `seat ${view.to_move} is bidding`;
    } else {
      this.status.textContent = table.myTurn()
        ? "Your turn"
        : `waiting for seat ${view.to_move}`;
    }

    this.bidBar.style.display =
      view.phase === "bidding" && table.myTurn() ? "" : "none";

    if (hints.available && (hints.rows?.length ?? 0) > 0) {
      this.hintBox.append(el("div", "hint-title", "suggested:"));
      for (const row of hints.rows!) {
        this.hintBox.append(button(row.label, () => this.handlers.onHint(row.move)));
      }
    }

    this.renderHand(table);
    this.playBtn.disabled = !table.canPlay();
    this.passBtn.disabled = !table.canPass();
    this.clearBtn.disabled = table.selection.length === 0;
    this.exportBtn.disabled = view.winner == null;
  }

  private renderHand(table: LiveTable): void {
    const selectedLeft = new Map<Card, number>();
    for (const c of table.selection) {
      selectedLeft.set(c, (selectedLeft.get(c) ?? 0) + 1);
    }
    for (const card of table.hand()) {
      const left = selectedLeft.get(card) ?? 0;
      const raised = left > 0;
      if (raised) selectedLeft.set(card, left - 1);
      const btn = button(card, () => this.handlers.onToggleCard(card));
      btn.className = raised ? "card raised" : "card";
      this.handBox.append(btn);
    }
  }

  // ----- replay render --------------------------------------------

  renderReplay(viewer: ReplayViewer): void {
    this.replayError.textContent = viewer.error ?? "";
    const hands = viewer.hands();
    for (let seat = 0; seat < 3; seat++) {
      const panel = this.replayHands[seat];
      panel.replaceChildren(
        el("div", "label", `${"LDU"[seat]} seat ${seat}`),
        el("div", "cards", hands[seat] === "" ? "(out)" : spaceCards(hands[seat])),
      );
    }
    if (!viewer.loaded) {
      this.replayStatus.textContent = viewer.error ? "" : "load a log to begin";
      return;
    }
    const step = viewer.lastStep();
    const pos = `${viewer.index}/${viewer.length}`;
    const last = step ? `  last: ${step.role} ${step.move}` : "";
    const banner = viewer.banner();
    this.replayStatus.textContent = banner ? `${pos}  ${banner}` : pos + last;
  }
}

// ----- small DOM helpers ------------------------------------------

function el(tag: string, cls = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text) node.textContent = text;
  return node;
}

function button(label: string, onClick: () => void): HTMLButtonElement {
  const btn = document.createElement("button");
  btn.type = "button";
  btn.textContent = label;
  btn.addEventListener("click", onClick);
  return btn;
}

function input(type: string, value: string): HTMLInputElement {
  const node = document.createElement("input");
  node.type = type;
  if (value) node.value = value;
  return node;
}

function renderSeat(panel: HTMLElement, view: import("./types.js").SessionState,
                    seat: number, you: number | null): void {
  panel.replaceChildren();
  const role = ROLE_OF_SEAT(view.landlord_seat, seat);
  const tags: string[] = [`seat ${seat}`, role];
  if (seat === you) tags.push("you");
  if (view.winner == null && view.to_move === seat) tags.push("to move");
  panel.append(el("div", "label", tags.join(" | ")));
  const count = view.hand_counts[seat];
  if (view.hands) {
    // spectate payloads carry every hand face up
    panel.append(el("div", "cards", spaceCards(view.hands[seat]) || "(out)"));
  } else if (seat !== you) {
    panel.append(el("div", "backs", "# ".repeat(count).trim()));
  }
  panel.append(el("div", "count", `${count} cards`));
}

function spaceCards(cards: string): string {
  return cardsOf(cards).join(" ");
}
