"""Head-to-head evaluation: paired decks, bidding rotations, Elo, accuracy.

The harness drives full games through the rules engine, so every emitted
log replays cleanly.  Deck randomness always flows from one seed through
per-deck child generators; identical seeds give identical reports even
when decks are sharded across worker threads.
"""

from __future__ import annotations

import csv
import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agents import Agent, UnsupportedAgent
from .cards import deal, format_cards
from .combos import action_space
from .encode import SeatView
from .game import GameState, MatchResult, Phase, Role, Side
from .matchlog import EmptyCorpus, MatchRecord, format_log


@dataclass
class MatchOutcome:
    result: MatchResult
    record: MatchRecord
    landlord_seat: int
    names: tuple[str, str, str]
    redeals: int = 0

    def log_line(self) -> str:
        return format_log(self.record)


def _bid_history(state: GameState) -> list[bool]:
    return [b for _, b in state.bid_decisions]


def run_match(agents, rng: np.random.Generator | None = None, *,
              deck=None, bidding: bool = False,
              bid_policy=None) -> MatchOutcome:
    """Play one full game and return scores plus a replayable record.

    agents is a length-3 list in seat order.  deck is (hands, kitty); when
    omitted, one is dealt from rng.  With bidding enabled the first bidder
    is drawn from rng and a triple no-bid redeals from the same stream;
    bid_policy(seat, hand, history) overrides the agents' own bid methods.
    """
    if len(agents) != 3:
        raise ValueError("need exactly 3 agents")
    if rng is None:
        rng = np.random.default_rng(0)
    for agent in agents:
        agent.reset()
    redeals = 0
    while True:
        if deck is None:
            hands, kitty = deal(rng)
        else:
            hands, kitty = deck
        hands = [np.array(h, dtype=np.int8, copy=True) for h in hands]
        kitty = np.array(kitty, dtype=np.int8, copy=True)
        if not bidding:
            state = GameState(hands, kitty, landlord_seat=0)
            break
        first = int(rng.integers(3))
        state = GameState(hands, kitty, first_bidder=first)
        while state.phase == Phase.BIDDING:
            seat = state.bidder
            history = _bid_history(state)
            if bid_policy is not None:
                wants = bid_policy(seat, state.hands[seat], history)
            else:
                wants = agents[seat].bid(state.hands[seat], history)
            state.bidding_step(bool(wants))
        if state.phase == Phase.PLAYING:
            break
        redeals += 1
        deck = None  # redeal draws fresh cards from the same stream

    lseat = state.landlord_seat
    record = MatchRecord(hands={
        state.role_of(s): state.hands[s].copy() for s in range(3)})
    space = action_space()
    while state.winner_side is None:
        seat = state.to_move
        legal = state.legal_action_ids()
        view = SeatView.from_state(state, seat)
        aid = int(agents[seat].decide(view, legal))
        record.moves.append((state.role_of(seat), space.cards[aid].copy()))
        state.apply_action_id(aid)
    return MatchOutcome(
        result=state.score(),
        record=record,
        landlord_seat=lseat,
        names=tuple(a.name for a in agents),
        redeals=redeals,
    )


@dataclass
class RoleLine:
    """WP/ADP aggregate for one agent in one role."""

    games: int = 0
    wins: int = 0
    points: float = 0.0

    def add(self, won: bool, pts: float) -> None:
        self.games += 1
        self.wins += int(won)
        self.points += pts

    @property
    def wp(self) -> float:
        return self.wins / self.games if self.games else 0.0

    @property
    def adp(self) -> float:
        return self.points / self.games if self.games else 0.0


@dataclass
class TournamentReport:
    agent_a: str
    agent_b: str
    num_decks: int
    seed: int
    landlord: RoleLine = field(default_factory=RoleLine)
    peasant: RoleLine = field(default_factory=RoleLine)
    deck_scores: list[float] = field(default_factory=list)

    @property
    def games(self) -> int:
        return self.landlord.games + self.peasant.games

    @property
    def wp(self) -> float:
        return (self.landlord.wins + self.peasant.wins) / self.games

    @property
    def adp(self) -> float:
        return (self.landlord.points + self.peasant.points) / self.games

    def rows(self) -> list[dict]:
        matchup = f"{self.agent_a} vs {self.agent_b}"
        out = []
        for role, line in (("landlord", self.landlord),
                           ("peasant", self.peasant)):
            out.append({"matchup": matchup, "role": role, "WP": line.wp,
                        "ADP": line.adp, "games": line.games,
                        "seed": self.seed})
        out.append({"matchup": matchup, "role": "overall", "WP": self.wp,
                    "ADP": self.adp, "games": self.games, "seed": self.seed})
        return out


def _deck_seeds(seed: int, num_decks: int):
    return np.random.SeedSequence(seed).spawn(num_decks)


def _play_paired_deck(agents_ab, child) -> tuple:
    """Two games on one deal, sides swapped; returns A's results."""
    agent_a, agent_b = agents_ab
    rng = np.random.default_rng(child)
    hands, kitty = deal(rng)
    deck = (hands, kitty)
    as_l = run_match([agent_a, agent_b, agent_b], rng, deck=deck)
    as_p = run_match([agent_b, agent_a, agent_a], rng, deck=deck)
    won_l = as_l.result.winner_side == Side.LANDLORD
    won_p = as_p.result.winner_side == Side.PEASANTS
    pts_l = as_l.result.landlord_points
    pts_p = as_p.result.peasant_team_points
    wins = int(won_l) + int(won_p)
    if wins == 2:
        score = 1.0
    elif wins == 0:
        score = 0.0
    else:
        total = pts_l + pts_p
        score = 1.0 if total > 0 else (0.0 if total < 0 else 0.5)
    return won_l, pts_l, won_p, pts_p, score


def paired_deck_tournament(agent_a, agent_b, num_decks: int,
                           seed: int = 0, workers: int = 1
                           ) -> TournamentReport:
    """Each deck is played twice with sides swapped on the same deal.

    agent_a / agent_b may be Agent instances or zero-argument factories;
    factories are required for workers > 1 so each thread owns private
    instances.  Results are reduced in deck order, so the report does not
    depend on scheduling.
    """
    def resolve(a):
        return a() if callable(a) and not isinstance(a, Agent) else a

    children = _deck_seeds(seed, num_decks)
    if workers <= 1:
        pair = (resolve(agent_a), resolve(agent_b))
        results = [_play_paired_deck(pair, c) for c in children]
    else:
        def work(child):
            return _play_paired_deck((resolve(agent_a), resolve(agent_b)),
                                     child)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, children))

    a0, b0 = resolve(agent_a), resolve(agent_b)
    report = TournamentReport(agent_a=a0.name, agent_b=b0.name,
                              num_decks=num_decks, seed=seed)
    for won_l, pts_l, won_p, pts_p, score in results:
        report.landlord.add(won_l, pts_l)
        report.peasant.add(won_p, pts_p)
        report.deck_scores.append(score)
    return report


@dataclass
class BiddingReport:
    names: list[str]
    num_decks: int
    seed: int
    lines: dict[str, RoleLine]
    redeals: int = 0

    @property
    def games(self) -> int:
        return next(iter(self.lines.values())).games if self.lines else 0

    def rows(self) -> list[dict]:
        matchup = " vs ".join(self.names)
        return [{"matchup": matchup, "role": name, "WP": line.wp,
                 "ADP": line.adp, "games": line.games, "seed": self.seed}
                for name, line in self.lines.items()]


def bidding_tournament(algos, num_decks: int, seed: int = 0,
                       bid_policy=None) -> BiddingReport:
    """All 6 seat rotations of 3 agents per deck, bidding phase included.

    Per game, an algorithm's ADP counts its own seat only: the landlord
    takes the landlord points, each peasant takes half the team points,
    so the three ADPs sum to zero on every deck.
    """
    if len(algos) != 3:
        raise ValueError("need exactly 3 agents")
    names = []
    for i, a in enumerate(algos):
        name = a.name if a.name not in names else f"{a.name}#{i}"
        names.append(name)
    lines = {n: RoleLine() for n in names}
    redeals = 0
    for child in _deck_seeds(seed, num_decks):
        rng = np.random.default_rng(child)
        hands, kitty = deal(rng)
        for perm in itertools.permutations(range(3)):
            seats = [algos[perm[s]] for s in range(3)]
            deck = ([h.copy() for h in hands], kitty.copy())
            out = run_match(seats, rng, deck=deck, bidding=True,
                            bid_policy=bid_policy)
            redeals += out.redeals
            for s in range(3):
                name = names[perm[s]]
                res = out.result
                if s == out.landlord_seat:
                    won = res.winner_side == Side.LANDLORD
                    pts = res.landlord_points
                else:
                    won = res.winner_side == Side.PEASANTS
                    pts = res.peasant_team_points / 2.0
                lines[name].add(won, pts)
    return BiddingReport(names=names, num_decks=num_decks, seed=seed,
                         lines=lines, redeals=redeals)


def elo(deck_outcomes, k: float = 32.0,
        initial: float = 1000.0) -> dict[str, float]:
    """Sequential Elo over (name_a, name_b, score_a) outcomes.

    score_a is 1, 0.5 or 0 for the deck.  The transfer is symmetric, so
    the rating sum is conserved exactly.
    """
    ratings: dict[str, float] = {}
    for name_a, name_b, score_a in deck_outcomes:
        ra = ratings.setdefault(name_a, initial)
        rb = ratings.setdefault(name_b, initial)
        expected = 1.0 / (1.0 + 10.0 ** ((rb - ra) / 400.0))
        delta = k * (score_a - expected)
        ratings[name_a] = ra + delta
        ratings[name_b] = rb - delta
    return ratings


def corpus_accuracy(agent, records) -> dict[str, float]:
    """Fraction of logged decisions the agent's greedy choice reproduces."""
    records = list(records)
    if not records:
        raise EmptyCorpus("no records to score")
    space = action_space()
    hits = {r: 0 for r in Role}
    totals = {r: 0 for r in Role}
    for record in records:
        hands = [record.hands[Role(i)].copy() for i in range(3)]
        state = GameState(hands, np.zeros(15, dtype=np.int8),
                          landlord_seat=0)
        for role, cards in record.moves:
            seat = state.to_move
            legal = state.legal_action_ids()
            view = SeatView.from_state(state, seat)
            choice = int(agent.decide(view, legal))
            aid = space.pass_id if not cards.any() else space.id_of(cards)
            hits[role] += int(choice == aid)
            totals[role] += 1
            state.apply_action_id(aid)
    out = {role.name.lower(): hits[role] / totals[role]
           for role in Role if totals[role]}
    out["avg"] = sum(out.values()) / len(out)
    return out


def _decision_stream(num_steps: int, seed: int):
    """Fixed stream of (view, legal) decision points from random self-play."""
    from .agents import RandomAgent
    rng = np.random.default_rng(seed)
    driver = RandomAgent(seed=seed + 1)
    steps = []
    while len(steps) < num_steps:
        hands, kitty = deal(rng)
        state = GameState(hands, kitty, landlord_seat=0)
        while state.winner_side is None:
            seat = state.to_move
            legal = state.legal_action_ids()
            steps.append((SeatView.from_state(state, seat), legal))
            state.apply_action_id(driver.decide(steps[-1][0], legal))
    return steps[:num_steps]


def inference_benchmark(agents, num_steps: int = 10_000,
                        warmup: int = 100, seed: int = 0) -> dict:
    """Single-threaded per-decision latency over one fixed decision stream.

    agents maps name -> Agent.  The first `warmup` timings per agent are
    discarded.  The shared move-count histogram is included so latency
    can be read against branching factor.
    """
    steps = _decision_stream(num_steps, seed)
    move_counts = np.array([len(legal) for _, legal in steps])
    hist = np.bincount(move_counts)
    report = {
        "num_steps": num_steps,
        "warmup": warmup,
        "move_count_histogram": hist.tolist(),
        "agents": {},
    }
    for name, agent in agents.items():
        times = np.empty(num_steps)
        for i, (view, legal) in enumerate(steps):
            t0 = time.perf_counter()
            agent.decide(view, legal)
            times[i] = time.perf_counter() - t0
        kept = times[warmup:] * 1e3
        report["agents"][name] = {
            "mean_ms": float(kept.mean()),
            "p50_ms": float(np.percentile(kept, 50)),
            "p99_ms": float(np.percentile(kept, 99)),
            "steps_timed": int(kept.size),
        }
    return report


def top_moves(agent, view: SeatView, legal, k: int = 3) -> list[dict]:
    """Best k legal moves by the agent's value head, ties broken by id."""
    values = agent.q_values(view, legal)
    order = np.argsort(-np.asarray(values), kind="stable")[:k]
    space = action_space()
    out = []
    for idx in order:
        aid = int(legal[int(idx)])
        label = "P" if aid == space.pass_id else format_cards(space.cards[aid])
        out.append({"move": label, "value": float(values[int(idx)])})
    return out


def dump_case_study(agent, record: MatchRecord, k: int = 3) -> dict:
    """Replay one log and attach the agent's top-k ranking per decision."""
    space = action_space()
    hands = [record.hands[Role(i)].copy() for i in range(3)]
    state = GameState(hands, np.zeros(15, dtype=np.int8), landlord_seat=0)
    cases = []
    for i, (role, cards) in enumerate(record.moves):
        legal = state.legal_action_ids()
        view = SeatView.from_state(state, state.to_move)
        cases.append({
            "index": i,
            "role": "LDU"[int(role)],
            "played": "P" if not cards.any() else format_cards(cards),
            "top": top_moves(agent, view, legal, k=k),
        })
        aid = space.pass_id if not cards.any() else space.id_of(cards)
        state.apply_action_id(aid)
    return {"log": format_log(record), "cases": cases}


def write_case_studies(agent, records, path, k: int = 3) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(dump_case_study(agent, record, k=k)))
            fh.write("\n")


_REPORT_FIELDS = ["matchup", "role", "WP", "ADP", "games", "seed"]


def write_report_csv(report, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=_REPORT_FIELDS)
        writer.writeheader()
        writer.writerows(report.rows())


def write_report_json(report, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.rows(), fh, indent=2)
        fh.write("\n")


__all__ = [
    "MatchOutcome", "run_match", "RoleLine", "TournamentReport",
    "paired_deck_tournament", "BiddingReport", "bidding_tournament", "elo",
    "corpus_accuracy", "inference_benchmark", "top_moves", "dump_case_study",
    "write_case_studies", "write_report_csv", "write_report_json",
]
