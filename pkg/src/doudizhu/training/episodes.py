"""Self-play episode generation with epsilon-greedy value agents.

One episode is a full game from a fresh uniform deal, landlord fixed at
seat 0 (deals are exchangeable, so the seat label carries no information).
Every decision of every seat becomes one training instance for that seat's
position network: (history, state, chosen action) with the return filled
in afterwards from the terminal reward.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..cards import deal
from ..combos import action_space
from ..encode import (SeatView, action_vectors, encode_history, encode_state,
                      state_width)
from ..game import GameState, MatchResult, Role, terminal_reward
from ..nn.models import PRESETS, QNetwork
from .returns import discounted_returns


@dataclass
class EpisodeRecord:
    """Per-position instance streams plus the scored outcome."""

    histories: dict[Role, list] = field(default_factory=dict)
    states: dict[Role, list] = field(default_factory=dict)
    actions: dict[Role, list] = field(default_factory=dict)
    rewards: dict[Role, np.ndarray] = field(default_factory=dict)
    result: MatchResult | None = None
    num_moves: int = 0

    def returns(self, gamma: float) -> dict[Role, np.ndarray]:
        return {pos: discounted_returns(rew, gamma)
                for pos, rew in self.rewards.items()}


def make_nets(preset: str, seed: int = 0) -> dict[Role, QNetwork]:
    """One value network per position, differing in state width."""
    cfg = PRESETS[preset]
    return {role: QNetwork(state_width(role), seed=seed + int(role), **cfg)
            for role in Role}


def play_episode(nets: dict[Role, QNetwork], epsilon: float,
                 rng: np.random.Generator, objective: str,
                 hands=None, kitty=None) -> EpisodeRecord:
    space = action_space()
    avecs = action_vectors()
    if hands is None:
        hands, kitty = deal(rng)
    state = GameState(hands, kitty, landlord_seat=0)
    rec = EpisodeRecord(
        histories={r: [] for r in Role},
        states={r: [] for r in Role},
        actions={r: [] for r in Role},
    )
    while state.winner_seat is None:
        seat = state.to_move
        role = state.role_of(seat)
        legal = state.legal_action_ids()
        view = SeatView.from_state(state, seat)
        hist = encode_history(view)
        svec = encode_state(view)
        if legal.size == 1:
            chosen = int(legal[0])
        elif epsilon > 0.0 and rng.random() < epsilon:
            chosen = int(legal[rng.integers(legal.size)])
        else:
            q = nets[role].evaluate_actions(hist, svec, avecs[legal])
            chosen = int(legal[int(np.argmax(q))])
        rec.histories[role].append(hist)
        rec.states[role].append(svec)
        rec.actions[role].append(avecs[chosen])
        state.apply_action_id(chosen, check=False)
        rec.num_moves += 1
    rec.result = state.score()
    for role in Role:
        n = len(rec.states[role])
        rew = np.zeros(n, dtype=np.float64)
        if n:
            rew[-1] = terminal_reward(rec.result, objective, role)
        rec.rewards[role] = rew
    return rec
