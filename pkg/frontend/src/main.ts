/** Application wiring: one Api per service base, one live table, one
 * event channel per session.  Every state change flows from a server
 * reply or a pushed event; the channel coalesces refreshes so bursts
 * of bot moves do not pile up parallel fetches.
 */

import { Api, ServiceError } from "./api.js";
import { HintPanel } from "./hints.js";
import { LiveTable } from "./table.js";
import { ReplayViewer } from "./replay.js";
import { EventChannel, fetchSource } from "./sse.js";
import { Ui } from "./ui.js";

class App {
  private api = new Api("http://127.0.0.1:8000");
  private table = new LiveTable(this.api);
  private hints = new HintPanel(this.api);
  private replayer = new ReplayViewer(this.api);
  private channel: EventChannel | null = null;
  private ui: Ui;
  private fetching = false;
  private pending = false;

  constructor(root: HTMLElement) {
    this.ui = new Ui(root, {
      onNewGame: (opts) => void this.newGame(opts),
      onToggleCard: (card) => {
        this.table.toggle(card);
        this.render();
      },
      onPlay: () => void this.submit(() => this.table.submit()),
      onPass: () => void this.submit(() => this.table.pass()),
      onClear: () => {
        this.table.clearSelection();
        this.render();
      },
      onBid: (wants) => void this.submit(() => this.table.submitBid(wants)),
      onHint: (move) => {
        if (this.table.preselect(move)) this.render();
      },
      onExportLog: () => void this.exportLog(),
      onLoadReplay: (text) => void this.loadReplay(text),
      onReplayStep: (where) => {
        if (where === "start") this.replayer.toStart();
        else if (where === "back") this.replayer.back();
        else if (where === "forward") this.replayer.forward();
        else this.replayer.toEnd();
        this.ui.renderReplay(this.replayer);
      },
    });
    this.render();
    this.ui.renderReplay(this.replayer);
  }

  private render(): void {
    this.ui.render(this.table, this.hints);
  }

  private async newGame(opts: { seat: number; bidding: boolean; seed: number | null }):
      Promise<void> {
    this.channel?.close();
    const base = this.ui.baseInput.value.trim().replace(/\/$/, "");
    this.api = new Api(base);
    this.table = new LiveTable(this.api);
    this.hints = new HintPanel(this.api);
    this.replayer = new ReplayViewer(this.api);
    this.ui.setNotice("");
    this.ui.setLog("");
    try {
      await this.table.start({
        human_seat: opts.seat,
        bidding: opts.bidding,
        ...(opts.seed === null ? {} : { seed: opts.seed }),
      });
    } catch (err) {
      this.ui.setNotice(`could not start: ${describe(err)}`);
      return;
    }
    await this.refreshTurn();
    this.render();
    this.channel = new EventChannel(fetchSource(base, this.table.sid), {
      onEvent: () => void this.poke(),
      onResync: () => this.poke(),
    });
    void this.channel.run();
  }

  /** Refetch state + turn data once; collapse bursts into one pass. */
  private async poke(): Promise<void> {
    if (!this.table.view) return;
    if (this.fetching) {
      this.pending = true;
      return;
    }
    this.fetching = true;
    try {
      do {
        this.pending = false;
        await this.table.refresh();
        await this.refreshTurn();
        this.render();
      } while (this.pending);
    } catch (err) {
      this.ui.setNotice(describe(err));
    } finally {
      this.fetching = false;
    }
  }

  private async refreshTurn(): Promise<void> {
    await this.table.refreshLegal();
    if (this.table.myTurn() && this.table.view?.phase === "playing") {
      try {
        await this.hints.refresh(this.table.sid);
      } catch {
        this.hints.clear(); // racing the game end is not an error
      }
    } else {
      this.hints.clear();
    }
  }

  private async submit(send: () => Promise<unknown>): Promise<void> {
    this.ui.setNotice("");
    try {
      await send();
    } catch (err) {
      if (err instanceof ServiceError && err.status === 422) {
        const legal = err.legalEcho();
        const tail = legal ? `  legal: ${legal.slice(0, 12).join(" ")}` : "";
        this.ui.setNotice(`rejected: ${reasonOf(err)}${tail}`);
        await this.table.refreshLegal();
      } else {
        this.ui.setNotice(describe(err));
      }
    }
    await this.refreshTurn();
    this.render();
  }

  private async exportLog(): Promise<void> {
    try {
      this.ui.setLog(await this.api.log(this.table.sid));
    } catch (err) {
      this.ui.setNotice(describe(err));
    }
  }

  private async loadReplay(text: string): Promise<void> {
    await this.replayer.load(text);
    this.replayer.toEnd();
    this.ui.renderReplay(this.replayer);
  }
}

function reasonOf(err: ServiceError): string {
  const detail = err.detail;
  if (detail && typeof detail === "object" && "reason" in (detail as object)) {
    return String((detail as { reason: unknown }).reason);
  }
  return String(detail);
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) return `service error ${err.status}: ${reasonOf(err)}`;
  return err instanceof Error ? err.message : String(err);
}

const rootEl = document.getElementById("app");
if (rootEl) new App(rootEl);
