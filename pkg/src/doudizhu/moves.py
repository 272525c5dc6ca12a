"""Legal-move queries against the canonical action table.

Leading uses precomputed per-(rank, count) bitmasks: AND 15 words-arrays
together and the set bits are exactly the playable action ids. Following
only scans the contiguous (category, length) block of the incumbent plus
the 14 bomb/rocket rows, so a query touches a few hundred rows at most.
Results are ascending id arrays, i.e. canonical (category, length,
principal, cards) order.
"""
from __future__ import annotations

import numpy as np

from .combos import ActionSpace, Category, action_space


def playable_mask(hand: np.ndarray, space: ActionSpace | None = None) -> np.ndarray:
    space = space or action_space()
    return (space.cards <= hand).all(axis=1)


def _fits_slice(space: ActionSpace, hand: np.ndarray, start: int, end: int) -> np.ndarray:
    if start >= end:
        return np.empty(0, dtype=np.int64)
    sub = (space.cards[start:end] <= hand).all(axis=1)
    return start + np.flatnonzero(sub)


def legal_ids(hand: np.ndarray, to_beat_id: int | None,
              space: ActionSpace | None = None) -> np.ndarray:
    """Action ids legal for this hand; to_beat_id None means leading."""
    space = space or action_space()
    if to_beat_id is None:
        ids = space.ids_from_bits(space.playable_bits(hand))
        # pass always "fits" an empty requirement and sorts first; drop it
        return ids[1:] if ids.size and ids[0] == space.pass_id else ids

    cat = int(space.category[to_beat_id])
    parts = [np.array([space.pass_id])]
    if cat == Category.ROCKET:
        return parts[0]
    if cat != Category.BOMB:
        start, end = space.blocks[(cat, int(space.length[to_beat_id]))]
        prin = space.principal[start:end]
        lo = start + int(np.searchsorted(prin, space.principal[to_beat_id], "right"))
        parts.append(_fits_slice(space, hand, lo, end))
        bstart, bend = space.blocks[(int(Category.BOMB), 1)]
    else:
        bstart, bend = space.blocks[(int(Category.BOMB), 1)]
        prin = space.principal[bstart:bend]
        bstart += int(np.searchsorted(prin, space.principal[to_beat_id], "right"))
    parts.append(_fits_slice(space, hand, bstart, bend))
    if hand[13] and hand[14]:
        parts.append(np.array([space.rocket_id]))
    return np.concatenate(parts)
