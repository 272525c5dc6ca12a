"""Card primitives: ranks, hand arrays, text notation, dealing.

Cards are abstracted to ranks (suits never matter in this game). A hand or
any set of cards is a length-15 int8 numpy array of per-rank counts, index
0..12 for 3,4,..,K,A,2 and 13/14 for the black and red joker.
"""
from __future__ import annotations

import numpy as np

NUM_RANKS = 15
BLACK_JOKER = 13
RED_JOKER = 14
NUM_NONJOKER = 13
RANK_2 = 12
CHAIN_TOP = 11  # rank A; 2 and the jokers never take part in chains

RANK_CHARS = "3456789TJQKA2BR"
_CHAR_TO_RANK = {c: i for i, c in enumerate(RANK_CHARS)}

CARDS_PER_PLAYER = 17
KITTY_SIZE = 3
DECK_SIZE = 54


def empty_hand() -> np.ndarray:
    return np.zeros(NUM_RANKS, dtype=np.int8)


def full_deck() -> np.ndarray:
    deck = np.full(NUM_RANKS, 4, dtype=np.int8)
    deck[BLACK_JOKER] = 1
    deck[RED_JOKER] = 1
    return deck


def parse_cards(text: str) -> np.ndarray:
    """Parse '3344B' style notation into a count array. Spaces are ignored."""
    counts = empty_hand()
    for ch in text:
        if ch.isspace():
            continue
        try:
            counts[_CHAR_TO_RANK[ch]] += 1
        except KeyError:
            raise ValueError(f"unknown card character {ch!r}") from None
    if np.any(counts > full_deck()):
        raise ValueError(f"more copies than the deck holds: {text!r}")
    return counts


def format_cards(counts: np.ndarray) -> str:
    """Inverse of parse_cards; ranks ascend, jokers last."""
    return "".join(RANK_CHARS[r] * int(counts[r]) for r in range(NUM_RANKS))


def cards_to_list(counts: np.ndarray) -> list[int]:
    out = []
    for r in range(NUM_RANKS):
        out.extend([r] * int(counts[r]))
    return out


def list_to_cards(ranks) -> np.ndarray:
    counts = empty_hand()
    for r in ranks:
        counts[r] += 1
    return counts


def deal(rng: np.random.Generator) -> tuple[list[np.ndarray], np.ndarray]:
    """Shuffle the 54-card deck; return three 17-card hands and the 3-card kitty."""
    deck = np.repeat(np.arange(NUM_RANKS), full_deck())
    rng.shuffle(deck)
    hands = [
        list_to_cards(deck[i * CARDS_PER_PLAYER : (i + 1) * CARDS_PER_PLAYER])
        for i in range(3)
    ]
    kitty = list_to_cards(deck[3 * CARDS_PER_PLAYER :])
    return hands, kitty
