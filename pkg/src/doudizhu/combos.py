"""Combo taxonomy: classification, dominance, and the full action space.

A combo is a playable card multiset with a unique reading as main group +
kickers. The kicker rules are tight enough that no multiset ever belongs to
two categories, and within a category the principal rank and chain length
are always unique:

- TrioSolo: one kicker card of any other rank (jokers allowed).
- TrioPair: one pair of another non-joker rank.
- QuadSolo: two kicker cards, either two distinct ranks or one non-joker
  pair; the two jokers together (a would-be Rocket) are not a valid kicker.
- QuadPair: two pairs of distinct non-joker ranks.
- PlaneSolo: n consecutive trios plus n kicker cards from outside the body;
  a rank may appear in the kickers up to three times, each joker once, both
  jokers together never. A multiset that could be read with two different
  bodies (e.g. 333444555666 + anything) is not a PlaneSolo at all; those
  12-card all-trio sets read as ChainTrio instead.
- PlanePair: n consecutive trios plus n pairs of distinct non-joker ranks
  outside the body. Never ambiguous.

Chains (and plane bodies) live on ranks 3..A only.
"""
from __future__ import annotations

import itertools
from enum import IntEnum

import numpy as np

from .cards import (
    BLACK_JOKER,
    CHAIN_TOP,
    NUM_NONJOKER,
    NUM_RANKS,
    RED_JOKER,
    empty_hand,
    format_cards,
)


class Category(IntEnum):
    PASS = 0
    SOLO = 1
    PAIR = 2
    TRIO = 3
    TRIO_SOLO = 4
    TRIO_PAIR = 5
    CHAIN_SOLO = 6
    CHAIN_PAIR = 7
    CHAIN_TRIO = 8
    PLANE_SOLO = 9
    PLANE_PAIR = 10
    QUAD_SOLO = 11
    QUAD_PAIR = 12
    BOMB = 13
    ROCKET = 14


CHAIN_SOLO_MIN, CHAIN_SOLO_MAX = 5, 12
CHAIN_PAIR_MIN, CHAIN_PAIR_MAX = 3, 10
CHAIN_TRIO_MIN, CHAIN_TRIO_MAX = 2, 6
PLANE_SOLO_MIN, PLANE_SOLO_MAX = 2, 5
PLANE_PAIR_MIN, PLANE_PAIR_MAX = 2, 4


class Combo:
    """One playable action. Equality and hashing go by the card multiset."""

    __slots__ = ("category", "principal", "length", "cards")

    def __init__(self, category: Category, principal: int, length: int,
                 cards: np.ndarray):
        self.category = category
        self.principal = principal
        self.length = length
        self.cards = cards

    def __eq__(self, other):
        if not isinstance(other, Combo):
            return NotImplemented
        return self.cards.tobytes() == other.cards.tobytes()

    def __hash__(self):
        return hash(self.cards.tobytes())

    def __repr__(self):
        if self.category == Category.PASS:
            return "Combo(PASS)"
        return (f"Combo({self.category.name} {format_cards(self.cards)} "
                f"principal={self.principal} length={self.length})")

    @property
    def is_pass(self) -> bool:
        return self.category == Category.PASS

    def sort_key(self):
        return (int(self.category), self.length, self.principal,
                self.cards.tobytes())


PASS_COMBO = Combo(Category.PASS, -1, 0, empty_hand())


def _run(nz: np.ndarray) -> bool:
    return nz.size > 0 and int(nz[-1] - nz[0]) == nz.size - 1


def _plane_solo(counts: np.ndarray, n: int) -> Combo | None:
    ln = n // 4
    if 4 * ln != n or not PLANE_SOLO_MIN <= ln <= PLANE_SOLO_MAX:
        return None
    if counts[BLACK_JOKER] and counts[RED_JOKER]:
        return None
    if counts.max() > 3:
        return None
    starts = [
        s
        for s in range(0, CHAIN_TOP - ln + 2)
        if np.all(counts[s : s + ln] == 3)
    ]
    if len(starts) != 1:
        return None
    return Combo(Category.PLANE_SOLO, starts[0], ln, counts)


def _plane_pair(counts: np.ndarray, n: int) -> Combo | None:
    ln = n // 5
    if 5 * ln != n or not PLANE_PAIR_MIN <= ln <= PLANE_PAIR_MAX:
        return None
    trios = np.flatnonzero(counts == 3)
    pairs = np.flatnonzero(counts == 2)
    if trios.size != ln or pairs.size != ln:
        return None
    if np.flatnonzero((counts != 0) & (counts != 2) & (counts != 3)).size:
        return None
    if trios[-1] > CHAIN_TOP or not _run(trios):
        return None
    if pairs[-1] >= NUM_NONJOKER:
        return None
    return Combo(Category.PLANE_PAIR, int(trios[0]), ln, counts)


def classify(counts: np.ndarray) -> Combo | None:
    """Total function: the unique Combo this multiset forms, else None."""
    n = int(counts.sum())
    if n == 0:
        return PASS_COMBO
    nz = np.flatnonzero(counts)
    if n == 1:
        return Combo(Category.SOLO, int(nz[0]), 1, counts)
    if n == 2:
        if counts[BLACK_JOKER] and counts[RED_JOKER]:
            return Combo(Category.ROCKET, BLACK_JOKER, 1, counts)
        if nz.size == 1 and nz[0] < NUM_NONJOKER:
            return Combo(Category.PAIR, int(nz[0]), 1, counts)
        return None
    if n == 3:
        if nz.size == 1 and nz[0] < NUM_NONJOKER:
            return Combo(Category.TRIO, int(nz[0]), 1, counts)
        return None
    if n == 4:
        if nz.size == 1:
            return Combo(Category.BOMB, int(nz[0]), 1, counts)
        if nz.size == 2:
            hi = [int(r) for r in nz if counts[r] == 3]
            if hi and hi[0] < NUM_NONJOKER:
                return Combo(Category.TRIO_SOLO, hi[0], 1, counts)
        return None
    if n == 5 and nz.size == 2:
        trio = [int(r) for r in nz if counts[r] == 3]
        pair = [int(r) for r in nz if counts[r] == 2]
        if trio and pair and trio[0] < NUM_NONJOKER and pair[0] < NUM_NONJOKER:
            return Combo(Category.TRIO_PAIR, trio[0], 1, counts)

    # uniform consecutive runs on 3..A
    if nz[-1] <= CHAIN_TOP and _run(nz):
        mult = int(counts[nz[0]])
        if np.all(counts[nz] == mult):
            ln = nz.size
            if mult == 1 and CHAIN_SOLO_MIN <= ln <= CHAIN_SOLO_MAX:
                return Combo(Category.CHAIN_SOLO, int(nz[0]), ln, counts)
            if mult == 2 and CHAIN_PAIR_MIN <= ln <= CHAIN_PAIR_MAX:
                return Combo(Category.CHAIN_PAIR, int(nz[0]), ln, counts)
            if mult == 3 and CHAIN_TRIO_MIN <= ln <= CHAIN_TRIO_MAX:
                return Combo(Category.CHAIN_TRIO, int(nz[0]), ln, counts)

    if n == 6:
        quad = [int(r) for r in nz if counts[r] == 4]
        if quad:
            q = quad[0]
            rest = [int(r) for r in nz if r != q]
            if len(rest) == 1 and counts[rest[0]] == 2 and rest[0] < NUM_NONJOKER:
                return Combo(Category.QUAD_SOLO, q, 1, counts)
            if (len(rest) == 2 and counts[rest[0]] == 1 and counts[rest[1]] == 1
                    and set(rest) != {BLACK_JOKER, RED_JOKER}):
                return Combo(Category.QUAD_SOLO, q, 1, counts)
        return None
    if n == 8:
        quad = [int(r) for r in nz if counts[r] == 4]
        if quad and nz.size == 3:
            q = quad[0]
            rest = [int(r) for r in nz if r != q]
            if all(counts[r] == 2 and r < NUM_NONJOKER for r in rest):
                return Combo(Category.QUAD_PAIR, q, 1, counts)

    combo = _plane_solo(counts, n)
    if combo is not None:
        return combo
    return _plane_pair(counts, n)


def beats(candidate: Combo, incumbent: Combo) -> bool:
    """Does candidate win over the incumbent combo on the table?"""
    if candidate.category == Category.ROCKET:
        return incumbent.category != Category.ROCKET
    if candidate.category == Category.BOMB:
        if incumbent.category == Category.ROCKET:
            return False
        if incumbent.category == Category.BOMB:
            return candidate.principal > incumbent.principal
        return True
    if incumbent.category in (Category.BOMB, Category.ROCKET):
        return False
    return (candidate.category == incumbent.category
            and candidate.length == incumbent.length
            and candidate.principal > incumbent.principal)


def _kicker_multisets(caps: dict[int, int], size: int):
    """All rank multisets of the given size under per-rank caps."""
    ranks = sorted(caps)

    def rec(i: int, left: int, cur: list[int]):
        if left == 0:
            yield tuple(cur)
            return
        if i == len(ranks):
            return
        r = ranks[i]
        for take in range(min(caps[r], left), -1, -1):
            cur.extend([r] * take)
            yield from rec(i + 1, left - take, cur)
            del cur[len(cur) - take :]

    yield from rec(0, size, [])


def _with(base: np.ndarray, extra) -> np.ndarray:
    c = base.copy()
    for r in extra:
        c[r] += 1
    return c


def _generate_all():
    yield PASS_COMBO
    for r in range(NUM_RANKS):
        c = empty_hand(); c[r] = 1
        yield Combo(Category.SOLO, r, 1, c)
    for r in range(NUM_NONJOKER):
        for mult, cat in ((2, Category.PAIR), (3, Category.TRIO),
                          (4, Category.BOMB)):
            c = empty_hand(); c[r] = mult
            yield Combo(cat, r, 1, c)
    c = empty_hand(); c[BLACK_JOKER] = 1; c[RED_JOKER] = 1
    yield Combo(Category.ROCKET, BLACK_JOKER, 1, c)

    for t in range(NUM_NONJOKER):
        base = empty_hand(); base[t] = 3
        for k in range(NUM_RANKS):
            if k == t:
                continue
            yield Combo(Category.TRIO_SOLO, t, 1, _with(base, [k]))
        for k in range(NUM_NONJOKER):
            if k == t:
                continue
            yield Combo(Category.TRIO_PAIR, t, 1, _with(base, [k, k]))

    for mult, cat, lo, hi in (
        (1, Category.CHAIN_SOLO, CHAIN_SOLO_MIN, CHAIN_SOLO_MAX),
        (2, Category.CHAIN_PAIR, CHAIN_PAIR_MIN, CHAIN_PAIR_MAX),
        (3, Category.CHAIN_TRIO, CHAIN_TRIO_MIN, CHAIN_TRIO_MAX),
    ):
        for ln in range(lo, hi + 1):
            for s in range(0, CHAIN_TOP - ln + 2):
                c = empty_hand()
                c[s : s + ln] = mult
                yield Combo(cat, s, ln, c)

    for q in range(NUM_NONJOKER):
        base = empty_hand(); base[q] = 4
        caps = {r: (1 if r >= NUM_NONJOKER else 2)
                for r in range(NUM_RANKS) if r != q}
        for kick in _kicker_multisets(caps, 2):
            if BLACK_JOKER in kick and RED_JOKER in kick:
                continue
            yield Combo(Category.QUAD_SOLO, q, 1, _with(base, kick))
        for pr in itertools.combinations(
                [r for r in range(NUM_NONJOKER) if r != q], 2):
            yield Combo(Category.QUAD_PAIR, q, 1, _with(base, pr + pr))

    # plane with solo kickers: collect then drop ambiguous bodies
    plane: dict[bytes, list] = {}
    for ln in range(PLANE_SOLO_MIN, PLANE_SOLO_MAX + 1):
        for s in range(0, CHAIN_TOP - ln + 2):
            base = empty_hand()
            base[s : s + ln] = 3
            caps = {r: (1 if r >= NUM_NONJOKER else 3)
                    for r in range(NUM_RANKS) if not s <= r < s + ln}
            for kick in _kicker_multisets(caps, ln):
                if BLACK_JOKER in kick and RED_JOKER in kick:
                    continue
                c = _with(base, kick)
                rec = plane.setdefault(c.tobytes(), [set(), None])
                rec[0].add(s)
                rec[1] = (s, ln, c)
    for starts, (s, ln, c) in plane.values():
        if len(starts) == 1:
            yield Combo(Category.PLANE_SOLO, s, ln, c)

    for ln in range(PLANE_PAIR_MIN, PLANE_PAIR_MAX + 1):
        for s in range(0, CHAIN_TOP - ln + 2):
            base = empty_hand()
            base[s : s + ln] = 3
            avail = [r for r in range(NUM_NONJOKER) if not s <= r < s + ln]
            for pr in itertools.combinations(avail, ln):
                yield Combo(Category.PLANE_PAIR, s, ln, _with(base, pr + pr))


class ActionSpace:
    """The 27,472 distinct actions in a fixed canonical order.

    Index 0 is always Pass. Lookup by card multiset via id_of; per-action
    metadata lives in flat arrays for vectorized legality filtering.
    """

    def __init__(self):
        combos = sorted(_generate_all(), key=Combo.sort_key)
        self.size = len(combos)
        self.cards = np.stack([c.cards for c in combos])
        self.category = np.array([int(c.category) for c in combos], dtype=np.int8)
        self.principal = np.array([c.principal for c in combos], dtype=np.int8)
        self.length = np.array([c.length for c in combos], dtype=np.int8)
        self.num_cards = self.cards.sum(axis=1).astype(np.int8)
        self._combos = combos
        self._index = {c.cards.tobytes(): i for i, c in enumerate(combos)}
        self.pass_id = self._index[empty_hand().tobytes()]
        self.rocket_id = int(np.flatnonzero(
            self.category == Category.ROCKET)[0])
        self.bomb_ids = np.flatnonzero(self.category == Category.BOMB)
        # contiguous (category, length) blocks in the canonical order, with
        # ascending principal inside each: lets follow queries scan one slice
        self.blocks: dict[tuple[int, int], tuple[int, int]] = {}
        keys = self.category.astype(np.int32) * 100 + self.length
        bounds = np.flatnonzero(np.diff(keys)) + 1
        starts = np.concatenate([[0], bounds])
        ends = np.concatenate([bounds, [self.size]])
        for s, e in zip(starts, ends):
            self.blocks[(int(self.category[s]), int(self.length[s]))] = (int(s), int(e))
        # per (rank, copies-held) bitmask over actions needing <= that many
        self._words = (self.size + 63) // 64
        self.bit_masks = np.zeros((15, 5, self._words), dtype=np.uint64)
        for r in range(15):
            col = self.cards[:, r]
            for c in range(5):
                packed = np.packbits(col <= c, bitorder="little")
                buf = np.zeros(self._words * 8, dtype=np.uint8)
                buf[: packed.size] = packed
                self.bit_masks[r, c] = buf.view(np.uint64)

    def playable_bits(self, hand: np.ndarray) -> np.ndarray:
        rows = self.bit_masks[np.arange(15), np.asarray(hand, dtype=np.int64)]
        return np.bitwise_and.reduce(rows, axis=0)

    def ids_from_bits(self, bits: np.ndarray) -> np.ndarray:
        nz = np.flatnonzero(bits)
        if nz.size == 0:
            return nz
        sub = np.unpackbits(bits[nz].view(np.uint8), bitorder="little")
        pos = np.flatnonzero(sub)
        return (nz[pos >> 6] << 6) + (pos & 63)

    def __len__(self):
        return self.size

    def combo(self, action_id: int) -> Combo:
        return self._combos[action_id]

    def id_of(self, counts: np.ndarray) -> int | None:
        return self._index.get(np.asarray(counts, dtype=np.int8).tobytes())

    def category_counts(self) -> dict[str, int]:
        names = {int(cat): cat.name for cat in Category}
        out = {name: 0 for name in names.values()}
        for v in self.category:
            out[names[int(v)]] += 1
        return out


_SPACE: ActionSpace | None = None


def action_space() -> ActionSpace:
    global _SPACE
    if _SPACE is None:
        _SPACE = ActionSpace()
    return _SPACE
