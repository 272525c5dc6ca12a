"""Textual match logs, one match per line.

Layout: `H:<landlord>;<down>;<up>, L:<move>, D:<move>, U:<move>, ...`
where hands and moves use rank characters (T for 10, B/R for the jokers)
and P stands for a pass. The landlord hand is the full 20 cards including
the kitty. An optional `#seed:<n>` prefix records the deal seed.

Parsing is whitespace-tolerant; replaying validates every move against the
rules and checks the seat labels follow turn order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .cards import format_cards, parse_cards
from .game import GameState, IllegalMove, Phase, Role, ROLE_BY_NAME, ROLE_NAMES
from .combos import action_space


class ParseError(ValueError):
    pass


class IllegalReplay(ValueError):
    pass


class EmptyCorpus(ValueError):
    pass


@dataclass
class MatchRecord:
    """Initial hands by role (landlord includes the kitty) plus the moves."""

    hands: dict[Role, np.ndarray]
    moves: list[tuple[Role, np.ndarray]] = field(default_factory=list)
    seed: int | None = None


_SEED_RE = re.compile(r"^#seed:(\d+)\s+")
_MOVE_RE = re.compile(r"^([LDU])\s*:\s*([0-9TJQKABRP23456789]+)$")


def format_log(record: MatchRecord) -> str:
    parts = ["H:" + ";".join(
        format_cards(record.hands[role])
        for role in (Role.LANDLORD, Role.DOWN, Role.UP))]
    for role, cards in record.moves:
        token = "P" if not cards.any() else format_cards(cards)
        parts.append(f"{ROLE_NAMES[role]}:{token}")
    line = ", ".join(parts)
    if record.seed is not None:
        line = f"#seed:{record.seed} {line}"
    return line


def parse_log(line: str) -> MatchRecord:
    text = line.strip()
    seed = None
    m = _SEED_RE.match(text)
    if m:
        seed = int(m.group(1))
        text = text[m.end():]
    if not text.startswith("H:"):
        raise ParseError("log must start with H:<hands>")
    tokens = [t.strip() for t in text.split(",")]
    hand_text = tokens[0][2:]
    hand_parts = hand_text.split(";")
    if len(hand_parts) != 3:
        raise ParseError(f"expected 3 hands, got {len(hand_parts)}")
    try:
        hands = {
            role: parse_cards(part)
            for role, part in zip((Role.LANDLORD, Role.DOWN, Role.UP),
                                  hand_parts)
        }
    except ValueError as e:
        raise ParseError(str(e)) from None
    sizes = [int(hands[r].sum()) for r in (Role.LANDLORD, Role.DOWN, Role.UP)]
    if sizes != [20, 17, 17]:
        raise ParseError(f"bad hand sizes {sizes}, want [20, 17, 17]")
    moves = []
    for tok in tokens[1:]:
        if not tok:
            continue
        m = _MOVE_RE.match(tok)
        if not m:
            raise ParseError(f"bad move token {tok!r}")
        role = ROLE_BY_NAME[m.group(1)]
        body = m.group(2)
        if body == "P":
            cards = np.zeros(15, dtype=np.int8)
        else:
            try:
                cards = parse_cards(body)
            except ValueError as e:
                raise ParseError(str(e)) from None
        moves.append((role, cards))
    return MatchRecord(hands=hands, moves=moves, seed=seed)


def replay(record: MatchRecord) -> GameState:
    """Validate and play the record through the engine; returns final state.

    Seats are laid out so seat index equals role (landlord at seat 0).
    """
    space = action_space()
    state = GameState(
        [record.hands[Role.LANDLORD], record.hands[Role.DOWN],
         record.hands[Role.UP]],
        np.zeros(15, dtype=np.int8),
        landlord_seat=0,
    )
    for i, (role, cards) in enumerate(record.moves):
        if state.phase != Phase.PLAYING:
            raise IllegalReplay(f"move {i}: game already over")
        expect = state.role_of(state.to_move)
        if expect != role:
            raise IllegalReplay(
                f"move {i}: {ROLE_NAMES[role]} out of turn "
                f"(expected {ROLE_NAMES[expect]})")
        aid = space.id_of(cards)
        if aid is None:
            raise IllegalReplay(
                f"move {i}: {format_cards(cards)!r} is not a combo")
        try:
            state.apply_action_id(aid)
        except IllegalMove as e:
            raise IllegalReplay(f"move {i}: {e}") from None
    return state


def record_games(lines) -> list[MatchRecord]:
    """Parse a corpus: skip blank lines and # comments without a seed tag."""
    out = []
    for line in lines:
        s = line.strip()
        if not s or (s.startswith("#") and not s.startswith("#seed:")):
            continue
        out.append(parse_log(s))
    return out
