"""Feature encoders: card vectors, move history, seat observations, bid input.

Card sets become 54-bit vectors: four thermometer bits per non-joker rank
(bit j set iff the rank has more than j copies) plus one bit per joker.
Injective, so features decode back to exact counts.

Seat observations follow a fixed flat layout (sizes in parentheses):

landlord, 319 total:
  own hand (54), union of the two hidden hands (54), move to beat (54),
  cards played by down (54) and up (54), down hand count (17),
  up hand count (17), bombs so far (15)

peasant, 430 total:
  own hand (54), union of hidden hands (54), move to beat (54), landlord's
  last move (54), other peasant's last move (54), cards played by landlord
  (54) and the other peasant (54), landlord hand count (20), other peasant
  hand count (17), bombs so far (15)

The move history is the most recent 15 moves, oldest first, zero-padded at
the old end, three consecutive 54-vectors per row: a 5x162 matrix. A pass
is a zero vector everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cards import BLACK_JOKER, NUM_NONJOKER, RED_JOKER, full_deck
from .combos import action_space
from .game import GameState, Role

CARD_VEC = 54
HISTORY_MOVES = 15
HISTORY_SHAPE = (5, 162)
LANDLORD_STATE = 319
PEASANT_STATE = 430
LANDLORD_ROW = LANDLORD_STATE + CARD_VEC
PEASANT_ROW = PEASANT_STATE + CARD_VEC
BID_WIDTH = 128


class PositionMismatch(ValueError):
    pass


class BadHandSize(ValueError):
    pass


def encode_cards(counts: np.ndarray) -> np.ndarray:
    out = np.zeros(CARD_VEC, dtype=np.float32)
    out[:52] = (
        counts[:NUM_NONJOKER, None] > np.arange(4, dtype=np.int8)
    ).ravel()
    out[52] = counts[BLACK_JOKER] >= 1
    out[53] = counts[RED_JOKER] >= 1
    return out


def decode_cards(vec: np.ndarray) -> np.ndarray:
    counts = np.zeros(15, dtype=np.int8)
    counts[:NUM_NONJOKER] = vec[:52].reshape(NUM_NONJOKER, 4).sum(axis=1)
    counts[BLACK_JOKER] = vec[52] > 0
    counts[RED_JOKER] = vec[53] > 0
    return counts


_ACTION_VECS: np.ndarray | None = None


def action_vectors() -> np.ndarray:
    """54-bit vectors for every action id, precomputed once."""
    global _ACTION_VECS
    if _ACTION_VECS is None:
        space = action_space()
        _ACTION_VECS = np.stack([encode_cards(space.cards[i])
                                 for i in range(len(space))])
    return _ACTION_VECS


@dataclass
class SeatView:
    """Everything a seat may legally see, derivable from public data alone."""

    seat: int
    role: Role
    hand: np.ndarray
    hand_counts: list[int]
    played: np.ndarray            # (3, 15) per-seat cards already played
    history_ids: list[tuple[int, int]]
    to_beat_id: int | None
    bombs: int
    landlord_seat: int

    @classmethod
    def from_state(cls, state: GameState, seat: int) -> "SeatView":
        return cls(
            seat=seat,
            role=state.role_of(seat),
            hand=state.hands[seat].copy(),
            hand_counts=state.hand_counts(),
            played=state.played.copy(),
            history_ids=list(state.history),
            to_beat_id=state.to_beat_id,
            bombs=state.bombs_played,
            landlord_seat=state.landlord_seat,
        )

    @classmethod
    def from_public(cls, own_hand: np.ndarray, history, landlord_seat: int,
                    seat: int) -> "SeatView":
        """Rebuild the view from own hand + public move history only."""
        space = action_space()
        played = np.zeros((3, 15), dtype=np.int8)
        bombs = 0
        to_beat = None
        owner = None
        passes = 0
        for s, aid in history:
            if aid == space.pass_id:
                passes += 1
                if passes == 2:
                    to_beat, owner, passes = None, owner, 0
            else:
                played[s] += space.cards[aid]
                if int(space.category[aid]) >= 13:  # bomb or rocket
                    bombs += 1
                to_beat, owner, passes = aid, s, 0
        start = np.array([20 if s == landlord_seat else 17 for s in range(3)])
        counts = (start - played.sum(axis=1)).tolist()
        counts[seat] = int(own_hand.sum())
        return cls(
            seat=seat,
            role=Role((seat - landlord_seat) % 3),
            hand=own_hand.copy(),
            hand_counts=[int(c) for c in counts],
            played=played,
            history_ids=list(history),
            to_beat_id=to_beat,
            bombs=bombs,
            landlord_seat=landlord_seat,
        )

    def last_move_vec(self, seat: int) -> np.ndarray:
        for s, aid in reversed(self.history_ids):
            if s == seat:
                return action_vectors()[aid]
        return np.zeros(CARD_VEC, dtype=np.float32)


def _one_hot(n: int, index: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.float32)
    if 0 <= index < n:
        v[index] = 1.0
    return v


def encode_history(view: SeatView) -> np.ndarray:
    ids = [aid for _, aid in view.history_ids[-HISTORY_MOVES:]]
    vecs = np.zeros((HISTORY_MOVES, CARD_VEC), dtype=np.float32)
    if ids:
        vecs[HISTORY_MOVES - len(ids):] = action_vectors()[ids]
    return vecs.reshape(HISTORY_SHAPE)


def encode_state(view: SeatView) -> np.ndarray:
    union = (full_deck() - view.hand - view.played.sum(axis=0)).astype(np.int8)
    if view.to_beat_id is None:
        to_beat = np.zeros(CARD_VEC, dtype=np.float32)
    else:
        to_beat = action_vectors()[view.to_beat_id]
    ls = view.landlord_seat
    if view.role == Role.LANDLORD:
        down, up = (ls + 1) % 3, (ls + 2) % 3
        parts = [
            encode_cards(view.hand),
            encode_cards(union),
            to_beat,
            encode_cards(view.played[down]),
            encode_cards(view.played[up]),
            _one_hot(17, view.hand_counts[down] - 1),
            _one_hot(17, view.hand_counts[up] - 1),
            _one_hot(15, view.bombs),
        ]
    else:
        other = next(s for s in range(3) if s not in (view.seat, ls))
        parts = [
            encode_cards(view.hand),
            encode_cards(union),
            to_beat,
            view.last_move_vec(ls),
            view.last_move_vec(other),
            encode_cards(view.played[ls]),
            encode_cards(view.played[other]),
            _one_hot(20, view.hand_counts[ls] - 1),
            _one_hot(17, view.hand_counts[other] - 1),
            _one_hot(15, view.bombs),
        ]
    return np.concatenate(parts)


@dataclass
class ObservationFeatures:
    state_vec: np.ndarray
    action_vec: np.ndarray
    history: np.ndarray
    position: Role


def encode_observation(view: SeatView, action_cards: np.ndarray,
                       position: Role) -> ObservationFeatures:
    if position != view.role:
        raise PositionMismatch(f"view is for {view.role!r}, not {position!r}")
    return ObservationFeatures(
        state_vec=encode_state(view),
        action_vec=encode_cards(action_cards),
        history=encode_history(view),
        position=position,
    )


def state_width(role: Role) -> int:
    return LANDLORD_STATE if role == Role.LANDLORD else PEASANT_STATE


def encode_bid(hand: np.ndarray, bid_history) -> np.ndarray:
    """128 bid-decision features.

    54 card bits, presence flags for solos (3..A), pairs, trios, bombs plus
    rocket, a 10-bit block for 2s and jokers (5-bit count of 2s, 3-bit
    joker count, 2 presence bits), and 4 bid-history steps as 3-way one-hot
    (not-yet / bid / no-bid).
    """
    if int(hand.sum()) != 17:
        raise BadHandSize(f"bidding hand must have 17 cards, got {hand.sum()}")
    out = np.zeros(BID_WIDTH, dtype=np.float32)
    out[:54] = encode_cards(hand)
    out[54:66] = hand[:12] >= 1
    out[66:79] = hand[:13] >= 2
    out[79:92] = hand[:13] >= 3
    out[92:105] = hand[:13] == 4
    out[105] = hand[BLACK_JOKER] and hand[RED_JOKER]
    twos = int(hand[12])
    jokers = int(hand[BLACK_JOKER] + hand[RED_JOKER])
    out[106:111] = _one_hot(5, twos)
    out[111:114] = _one_hot(3, jokers)
    out[114] = hand[BLACK_JOKER] >= 1
    out[115] = hand[RED_JOKER] >= 1
    for i in range(4):
        base = 116 + 3 * i
        if i >= len(bid_history):
            out[base] = 1.0
        elif bid_history[i]:
            out[base + 1] = 1.0
        else:
            out[base + 2] = 1.0
    return out


def serialize_rows(rows: np.ndarray) -> bytes:
    """Little-endian float32 row dump; the declared order, nothing else."""
    return np.ascontiguousarray(rows, dtype="<f4").tobytes()


def deserialize_rows(data: bytes, width: int) -> np.ndarray:
    flat = np.frombuffer(data, dtype="<f4")
    if width <= 0 or flat.size % width:
        raise ValueError(f"byte length {len(data)} not a multiple of width {width}")
    return flat.reshape(-1, width).copy()
