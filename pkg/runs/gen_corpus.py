"""Generate the rule-agent corpus: 50k playing logs + 30k bid-labeled hands."""
import json, sys, time

import numpy as np

from doudizhu.agents import RuleAgent
from doudizhu.cards import deal, format_cards
from doudizhu.game import GameState, Role, Side
from doudizhu.encode import SeatView
from doudizhu.matchlog import MatchRecord, format_log
from doudizhu.combos import action_space

NUM_SL = 50_000
NUM_BID_DECKS = 10_000
space = action_space()
agent = RuleAgent()


def play(hands, kitty, landlord_seat):
    st = GameState([h.copy() for h in hands], kitty.copy(),
                   landlord_seat=landlord_seat)
    rec = MatchRecord(hands={st.role_of(s): st.hands[s].copy() for s in range(3)})
    while st.winner_side is None:
        seat = st.to_move
        aid = agent.decide(SeatView.from_state(st, seat), st.legal_action_ids())
        rec.moves.append((st.role_of(seat), space.cards[aid].copy()))
        st.apply_action_id(aid)
    return rec, st.winner_side


t0 = time.time()
rng = np.random.default_rng(20240601)
with open("runs/sl_corpus.txt", "w") as fh:
    for i in range(NUM_SL):
        hands, kitty = deal(rng)
        rec, _ = play(hands, kitty, 0)
        fh.write(format_log(rec) + "\n")
        if (i + 1) % 5000 == 0:
            print(f"sl {i+1}/{NUM_SL} {time.time()-t0:.0f}s", flush=True)

rng = np.random.default_rng(20240602)
t1 = time.time()
with open("runs/bid_corpus.jsonl", "w") as fh:
    for i in range(NUM_BID_DECKS):
        hands, kitty = deal(rng)
        for seat in range(3):
            _, winner = play(hands, kitty, seat)
            hist = [bool(b) for b in rng.integers(2, size=int(rng.integers(4)))]
            fh.write(json.dumps({
                "hand": format_cards(hands[seat]),
                "history": hist,
                "label": int(winner == Side.LANDLORD),
            }) + "\n")
        if (i + 1) % 2000 == 0:
            print(f"bid {i+1}/{NUM_BID_DECKS} {time.time()-t1:.0f}s", flush=True)
print(f"done {time.time()-t0:.0f}s", flush=True)
