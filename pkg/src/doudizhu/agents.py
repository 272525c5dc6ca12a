"""Playing policies: random, rule-based, and value-network driven.

Every agent answers ``decide(view, legal)`` with one id out of ``legal``.
Agents that can rank moves also expose ``q_values`` so callers can build
hint lists or case studies; the others raise ``UnsupportedAgent`` there.
"""

from __future__ import annotations

import numpy as np

from .combos import Category, action_space
from .encode import (SeatView, action_vectors, encode_bid, encode_history,
                     encode_state)
from .game import Role
from .nn.checkpoint import load_checkpoint
from .nn.models import BidNetwork
from .training.episodes import PRESETS, make_nets


class UnsupportedAgent(Exception):
    """The agent cannot produce the requested artifact (e.g. q_values)."""


class Agent:
    """Interface shared by all policies."""

    name = "agent"

    def decide(self, view: SeatView, legal: np.ndarray) -> int:
        raise NotImplementedError

    def bid(self, hand: np.ndarray, history) -> bool:
        """Whether to bid for Landlord given the 17-card hand so far."""
        raise UnsupportedAgent(f"{self.name} has no bidding policy")

    def q_values(self, view: SeatView, legal: np.ndarray) -> np.ndarray:
        raise UnsupportedAgent(f"{self.name} does not score moves")

    def reset(self) -> None:
        """Called between games; stateless agents ignore it."""


class RandomAgent(Agent):
    """Uniform choice over the legal moves, uniform coin for bids."""

    def __init__(self, seed: int = 0, name: str = "random"):
        self.name = name
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def decide(self, view, legal):
        return int(self.rng.choice(legal))

    def bid(self, hand, history):
        return bool(self.rng.integers(2))

    def reset(self):
        # restart the stream so repeated matches on one deal replay alike
        self.rng = np.random.default_rng(self.seed)


def _chain_candidates(counts: np.ndarray):
    """Yield (card_count, mult, start, length) for every maximal chain."""
    specs = ((1, 5), (2, 3), (3, 2))  # multiplicity, minimum length
    for mult, min_len in specs:
        ok = counts[:12] >= mult
        start = None
        for r in range(13):
            if r < 12 and ok[r]:
                if start is None:
                    start = r
            elif start is not None:
                length = r - start
                if length >= min_len:
                    yield (length * mult, mult, start, length)
                start = None


_CHAIN_CATEGORY = {1: Category.CHAIN_SOLO, 2: Category.CHAIN_PAIR,
                   3: Category.CHAIN_TRIO}


def decompose_hand(hand: np.ndarray) -> list[np.ndarray]:
    """Greedy split of a hand into disjoint playable units.

    Chains are peeled first, longest (most cards) first; ties prefer lower
    multiplicity, then the lowest start rank.  Whatever remains becomes
    bombs, trios, pairs and solos, with B+R merged into a rocket.  The
    result is deterministic for a given hand.
    """
    counts = np.asarray(hand, dtype=np.int8).copy()
    units = []
    while True:
        best = None
        for cand in _chain_candidates(counts):
            key = (-cand[0], cand[1], cand[2])
            if best is None or key < best[0]:
                best = (key, cand)
        if best is None:
            break
        _, (_, mult, start, length) = best
        unit = np.zeros(15, dtype=np.int8)
        unit[start:start + length] = mult
        counts[start:start + length] -= mult
        units.append(unit)
    if counts[13] and counts[14]:
        unit = np.zeros(15, dtype=np.int8)
        unit[13] = unit[14] = 1
        counts[13] = counts[14] = 0
        units.append(unit)
    for rank in range(15):
        n = int(counts[rank])
        if n:
            unit = np.zeros(15, dtype=np.int8)
            unit[rank] = n
            units.append(unit)
    return units


class RuleAgent(Agent):
    """Deterministic heuristic used as a fixed opponent and log generator.

    Leading: play the decomposition unit with the lowest principal rank.
    Following: the cheapest same-shape answer if one exists; otherwise a
    bomb or rocket, but only when that play empties the hand; else pass.
    """

    def __init__(self, name: str = "rule"):
        self.name = name
        self.space = action_space()

    def decide(self, view, legal):
        space = self.space
        if view.to_beat_id is None:
            units = decompose_hand(view.hand)
            ids = [space.id_of(u) for u in units]
            ids = [a for a in ids if a is not None]
            assert ids, "decomposition produced no playable unit"
            return min(ids, key=lambda a: (int(space.principal[a]),
                                           int(space.category[a]),
                                           int(space.length[a])))
        inc_cat = int(space.category[view.to_beat_id])
        inc_len = int(space.length[view.to_beat_id])
        hand_size = int(view.hand.sum())
        rocket = None
        for aid in legal:
            aid = int(aid)
            if aid == space.pass_id:
                continue
            cat = int(space.category[aid])
            if cat == inc_cat and int(space.length[aid]) == inc_len:
                return aid  # legal ids are sorted, first hit is cheapest
            if cat == int(Category.BOMB) and hand_size == 4:
                return aid
            if cat == int(Category.ROCKET):
                rocket = aid
        if rocket is not None and hand_size == 2:
            return rocket
        return space.pass_id

    def bid(self, hand, history):
        # bid when holding heavy artillery: a rocket, a bomb, or 2+ twos
        counts = np.asarray(hand)
        return bool((counts[13] and counts[14]) or (counts[:13] >= 4).any()
                    or counts[12] >= 2)


class ValueAgent(Agent):
    """Greedy argmax over per-role action-value networks."""

    def __init__(self, nets: dict[Role, object], name: str = "value",
                 bid_net: BidNetwork | None = None):
        self.name = name
        self.nets = nets
        self.bid_net = bid_net

    @classmethod
    def from_checkpoint(cls, path: str, preset: str = "desk",
                        name: str | None = None, bid_path: str | None = None):
        from .training.dmc import load_nets
        nets = make_nets(preset, seed=0)
        load_nets(nets, path)
        bid_net = load_bid_network(bid_path) if bid_path else None
        return cls(nets, name=name or "value", bid_net=bid_net)

    def q_values(self, view, legal):
        net = self.nets[view.role]
        hist = encode_history(view)
        svec = encode_state(view)
        avecs = action_vectors()[np.asarray(legal, dtype=np.int64)]
        return net.evaluate_actions(hist, svec, avecs)

    def decide(self, view, legal):
        scores = self.q_values(view, legal)
        return int(legal[int(np.argmax(scores))])

    def bid(self, hand, history):
        if self.bid_net is None:
            raise UnsupportedAgent(f"{self.name} has no bidding net")
        feat = encode_bid(np.asarray(hand), history)
        return bool(self.bid_net.forward(feat[None, :])[0] > 0.5)


def load_bid_network(path: str) -> BidNetwork:
    net = BidNetwork(seed=0)
    blob = load_checkpoint(path)
    for key, arr in net.params().items():
        arr[...] = blob[key].reshape(arr.shape)
    return net


def agent_from_spec(spec: str, preset: str = "desk",
                    bid_path: str | None = None) -> Agent:
    """Build an agent from a CLI spec string.

    Forms: ``random``, ``random:SEED``, ``rule``, ``dmc:CKPT``,
    ``sl:CKPT``, with an optional trailing ``:PRESET`` for the value
    agents (defaults to the given preset).
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "random":
        seed = int(rest) if rest else 0
        return RandomAgent(seed=seed, name=f"random:{seed}" if rest else "random")
    if kind == "rule":
        return RuleAgent()
    if kind in ("dmc", "sl"):
        if not rest:
            raise ValueError(f"{kind} spec needs a checkpoint path: {spec!r}")
        path, _, psel = rest.partition(":")
        cls = DMCAgent if kind == "dmc" else SLAgent
        nets = make_nets(psel or preset, seed=0)
        from .training.dmc import load_nets
        load_nets(nets, path)
        bid_net = load_bid_network(bid_path) if bid_path else None
        return cls(nets, name=kind, bid_net=bid_net)
    raise ValueError(f"unknown agent spec {spec!r}")


class DMCAgent(ValueAgent):
    """Self-play trained action-value agent."""

    def __init__(self, nets, name="dmc", bid_net=None):
        super().__init__(nets, name=name, bid_net=bid_net)


class SLAgent(ValueAgent):
    """Log-imitation trained agent; scores are logits, argmax still applies."""

    def __init__(self, nets, name="sl", bid_net=None):
        super().__init__(nets, name=name, bid_net=bid_net)


__all__ = ["Agent", "RandomAgent", "RuleAgent", "ValueAgent", "DMCAgent",
           "SLAgent", "UnsupportedAgent", "decompose_hand", "agent_from_spec",
           "load_bid_network", "PRESETS"]
