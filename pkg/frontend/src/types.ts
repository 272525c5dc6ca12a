/** Shapes of the JSON payloads the game service serves.  The client
 * renders exclusively from these; it never simulates rules locally. */

export interface HistoryEntry {
  seat: number;
  role: "L" | "D" | "U";
  move: string;
}

export interface BidEntry {
  seat: number;
  bid: boolean;
}

export interface SessionState {
  session_id: string;
  phase: "bidding" | "redeal" | "playing" | "finished";
  your_seat: number | null;
  hand?: string;          // own cards, live sessions only
  hands?: string[];       // face up, spectate/replay only
  hand_counts: number[];
  bombs: number;
  landlord_seat: number | null;
  history: HistoryEntry[];
  to_beat: string | null;
  to_move: number | null;
  winner: "landlord" | "peasants" | null;
  landlord_points?: number;
  bid_history: BidEntry[];
}

export interface LegalReply {
  bidding: boolean;
  moves: string[];
}

export interface Hint {
  move: string;
  value: number;
}

export interface HintsReply {
  k: number;
  hints: Hint[];
}

export interface ReplayStep {
  seat: number;
  role: "L" | "D" | "U";
  move: string;
  hands_after: string[];
}

export interface ReplayReply {
  hands: string[];
  steps: ReplayStep[];
  winner: "landlord" | "peasants";
  landlord_points: number;
  bombs: number;
}

export interface GameEvent {
  id: number;
  type: "bid" | "redeal" | "playing" | "turn" | "terminal";
  [key: string]: unknown;
}
