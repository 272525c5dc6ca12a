"""Game state machine: bidding, trick play, scoring.

Seats are table positions 0/1/2 in play order. Roles are relative to the
landlord: the landlord herself, the peasant who moves right after her
("down"), and the one who moves right before her ("up"). The two peasants
form one side.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import moves
from .cards import empty_hand, full_deck
from .combos import Category, Combo, action_space


class Phase(IntEnum):
    BIDDING = 0
    PLAYING = 1
    FINISHED = 2
    REDEAL = 3


class Role(IntEnum):
    LANDLORD = 0
    DOWN = 1
    UP = 2


class Side(IntEnum):
    LANDLORD = 0
    PEASANTS = 1


ROLE_NAMES = {Role.LANDLORD: "L", Role.DOWN: "D", Role.UP: "U"}
ROLE_BY_NAME = {v: k for k, v in ROLE_NAMES.items()}

# Per-category weights of the public-ladder score: each combo a side plays
# adds weight/100 on top of the 2-point winning bonus.
CATEGORY_WEIGHTS = {
    Category.PASS: 0,
    Category.SOLO: 1,
    Category.PAIR: 2,
    Category.TRIO: 4,
    Category.TRIO_SOLO: 4,
    Category.TRIO_PAIR: 4,
    Category.CHAIN_SOLO: 6,
    Category.CHAIN_PAIR: 6,
    Category.CHAIN_TRIO: 8,
    Category.PLANE_SOLO: 8,
    Category.PLANE_PAIR: 8,
    Category.QUAD_SOLO: 8,
    Category.QUAD_PAIR: 8,
    Category.BOMB: 10,
    Category.ROCKET: 16,
}


class GameError(Exception):
    pass


class PhaseError(GameError):
    pass


class IllegalMove(GameError):
    pass


@dataclass
class MatchResult:
    winner_side: Side
    bombs: int
    landlord_points: float
    peasant_team_points: float
    botzone_landlord: float
    botzone_peasants: float


def game_stake(bombs: int) -> int:
    """Base point 1, doubled once per bomb (rocket included)."""
    return 2 ** bombs


class GameState:
    """Mutable engine state; clone() before branching."""

    def __init__(self, hands, kitty, *, landlord_seat: int | None = None,
                 first_bidder: int | None = None):
        self.hands = np.stack([np.asarray(h, dtype=np.int8) for h in hands])
        self.kitty = np.asarray(kitty, dtype=np.int8)
        self.history: list[tuple[int, int]] = []  # (seat, action_id)
        self.played = np.zeros((3, 15), dtype=np.int8)
        self.bombs_played = 0
        self.to_beat_id: int | None = None
        self.trick_owner: int | None = None
        self.pass_count = 0
        self.winner_seat: int | None = None
        self.bid_decisions: list[tuple[int, bool]] = []
        self._outbid_queue: list[int] = []
        self._bid_holder: int | None = None
        if landlord_seat is not None:
            self.phase = Phase.PLAYING
            self.landlord_seat = landlord_seat
            self.hands[landlord_seat] += self.kitty
            self.to_move = landlord_seat
            self.bidder = None
        else:
            if first_bidder is None:
                raise ValueError("need landlord_seat or first_bidder")
            self.phase = Phase.BIDDING
            self.landlord_seat = None
            self.to_move = None
            self.bidder = first_bidder

    def clone(self) -> "GameState":
        other = object.__new__(GameState)
        other.hands = self.hands.copy()
        other.kitty = self.kitty.copy()
        other.history = list(self.history)
        other.played = self.played.copy()
        other.bombs_played = self.bombs_played
        other.to_beat_id = self.to_beat_id
        other.trick_owner = self.trick_owner
        other.pass_count = self.pass_count
        other.winner_seat = self.winner_seat
        other.bid_decisions = list(self.bid_decisions)
        other._outbid_queue = list(self._outbid_queue)
        other._bid_holder = self._bid_holder
        other.phase = self.phase
        other.landlord_seat = self.landlord_seat
        other.to_move = self.to_move
        other.bidder = self.bidder
        return other

    # roles ------------------------------------------------------------
    def role_of(self, seat: int) -> Role:
        return Role((seat - self.landlord_seat) % 3)

    def seat_of(self, role: Role) -> int:
        return (self.landlord_seat + int(role)) % 3

    def side_of(self, seat: int) -> Side:
        return Side.LANDLORD if seat == self.landlord_seat else Side.PEASANTS

    # bidding ----------------------------------------------------------
    def bidding_step(self, bid: bool) -> None:
        if self.phase != Phase.BIDDING:
            raise PhaseError("not in the bidding phase")
        seat = self.bidder
        self.bid_decisions.append((seat, bid))
        if self._bid_holder is None:
            if bid:
                self._bid_holder = seat
                self._outbid_queue = [(seat + 1) % 3, (seat + 2) % 3]
                self.bidder = self._outbid_queue.pop(0)
            else:
                if len(self.bid_decisions) == 3:
                    self.phase = Phase.REDEAL
                    self.bidder = None
                else:
                    self.bidder = (seat + 1) % 3
            return
        if bid:
            self._bid_holder = seat
        if self._outbid_queue:
            self.bidder = self._outbid_queue.pop(0)
        else:
            self.landlord_seat = self._bid_holder
            self.hands[self.landlord_seat] += self.kitty
            self.phase = Phase.PLAYING
            self.to_move = self.landlord_seat
            self.bidder = None

    # playing ----------------------------------------------------------
    def legal_action_ids(self) -> np.ndarray:
        if self.phase != Phase.PLAYING:
            raise PhaseError("game is not in play")
        return moves.legal_ids(self.hands[self.to_move], self.to_beat_id)

    def legal_moves(self) -> list[Combo]:
        space = action_space()
        return [space.combo(int(i)) for i in self.legal_action_ids()]

    def apply_action_id(self, action_id: int, *, check: bool = True) -> None:
        if self.phase != Phase.PLAYING:
            raise PhaseError("game is not in play")
        space = action_space()
        if check and action_id not in self.legal_action_ids():
            raise IllegalMove(
                f"action {space.combo(action_id)!r} not legal here")
        seat = self.to_move
        self.history.append((seat, action_id))
        if action_id == space.pass_id:
            self.pass_count += 1
            if self.pass_count == 2:
                self.to_beat_id = None
                self.pass_count = 0
                self.to_move = self.trick_owner
            else:
                self.to_move = (seat + 1) % 3
            return
        cards = space.cards[action_id]
        self.hands[seat] -= cards
        self.played[seat] += cards
        cat = Category(int(space.category[action_id]))
        if cat in (Category.BOMB, Category.ROCKET):
            self.bombs_played += 1
        self.to_beat_id = action_id
        self.trick_owner = seat
        self.pass_count = 0
        if not self.hands[seat].any():
            self.phase = Phase.FINISHED
            self.winner_seat = seat
            self.to_move = None
        else:
            self.to_move = (seat + 1) % 3

    def apply_move(self, combo: Combo, *, check: bool = True) -> None:
        aid = action_space().id_of(combo.cards)
        if aid is None:
            raise IllegalMove(f"not an action: {combo!r}")
        self.apply_action_id(aid, check=check)

    @property
    def winner_side(self) -> Side | None:
        if self.winner_seat is None:
            return None
        return self.side_of(self.winner_seat)

    # bookkeeping views ------------------------------------------------
    def hand_counts(self) -> list[int]:
        return [int(h.sum()) for h in self.hands]

    def union_of_others(self, seat: int) -> np.ndarray:
        """Everything not in this seat's hand and not yet played."""
        return (full_deck() - self.hands[seat]
                - self.played.sum(axis=0, dtype=np.int8)).astype(np.int8)

    def current_combo(self) -> Combo | None:
        if self.to_beat_id is None:
            return None
        return action_space().combo(self.to_beat_id)

    def last_move_of(self, seat: int) -> np.ndarray:
        """Cards of the seat's most recent action; zeros for Pass or none."""
        space = action_space()
        for s, aid in reversed(self.history):
            if s == seat:
                return space.cards[aid]
        return empty_hand()

    def score(self) -> MatchResult:
        if self.phase != Phase.FINISHED:
            raise PhaseError("game not finished")
        stake = game_stake(self.bombs_played)
        side = self.winner_side
        landlord_points = 2.0 * stake * (1 if side == Side.LANDLORD else -1)
        space = action_space()
        weight = [0, 0, 0]
        for seat, aid in self.history:
            weight[seat] += CATEGORY_WEIGHTS[Category(int(space.category[aid]))]
        lseat = self.landlord_seat
        bz_l = (2.0 if side == Side.LANDLORD else 0.0) + weight[lseat] / 100.0
        p_seats = [s for s in range(3) if s != lseat]
        win_p = 2.0 if side == Side.PEASANTS else 0.0
        bz_p = sum(win_p + weight[s] / 100.0 for s in p_seats) / 2.0
        return MatchResult(
            winner_side=side,
            bombs=self.bombs_played,
            landlord_points=landlord_points,
            peasant_team_points=-landlord_points,
            botzone_landlord=bz_l,
            botzone_peasants=bz_p,
        )


def terminal_reward(result: MatchResult, objective: str, role: Role) -> float:
    """Per-seat reward: WP is win/lose, ADP is the signed stake.

    The landlord carries the full double stake; each peasant carries half
    the team's value so the three seats stay zero-sum.
    """
    landlord_won = result.winner_side == Side.LANDLORD
    mine = landlord_won if role == Role.LANDLORD else not landlord_won
    if objective == "wp":
        return 1.0 if mine else -1.0
    if objective == "adp":
        stake = game_stake(result.bombs)
        if role == Role.LANDLORD:
            return 2.0 * stake if mine else -2.0 * stake
        return float(stake) if mine else -float(stake)
    raise ValueError(f"unknown objective {objective!r}")
