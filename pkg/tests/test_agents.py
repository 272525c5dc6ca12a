import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doudizhu.agents import (DMCAgent, RandomAgent, RuleAgent, SLAgent,
                             UnsupportedAgent, ValueAgent, agent_from_spec,
                             decompose_hand, load_bid_network)
from doudizhu.cards import deal, parse_cards
from doudizhu.encode import SeatView
from doudizhu.game import GameState
from doudizhu.nn import BidNetwork, save_checkpoint
from doudizhu.training.dmc import save_nets
from doudizhu.training.episodes import make_nets


def hand_strategy(max_cards=20):
    per_rank = [st.integers(0, 4)] * 13 + [st.integers(0, 1)] * 2
    return (st.tuples(*per_rank)
            .map(lambda t: np.array(t, dtype=np.int8))
            .filter(lambda h: 1 <= h.sum() <= max_cards))


@given(hand_strategy())
@settings(max_examples=150, deadline=None)
def test_decomposition_partitions_hand(space, hand):
    units = decompose_hand(hand)
    assert (sum(units) == hand).all()
    for unit in units:
        assert space.id_of(unit) is not None, unit


def test_decomposition_examples(space):
    units = decompose_hand(parse_cards("34567"))
    assert len(units) == 1
    units = decompose_hand(parse_cards("BR"))
    assert len(units) == 1 and space.category[space.id_of(units[0])] == 14
    units = decompose_hand(parse_cards("3333"))
    assert len(units) == 1 and space.category[space.id_of(units[0])] == 13
    # identical calls give identical splits
    h = parse_cards("3344556678999TJQKA2")
    a = [u.tobytes() for u in decompose_hand(h)]
    b = [u.tobytes() for u in decompose_hand(h)]
    assert a == b


def random_positions(seed, n):
    """Decision points sampled from random play."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        hands, kitty = deal(rng)
        state = GameState(hands, kitty, landlord_seat=0)
        while state.winner_seat is None and len(out) < n:
            legal = state.legal_action_ids()
            out.append((SeatView.from_state(state, state.to_move), legal))
            state.apply_action_id(int(rng.choice(legal)))
    return out


def test_rule_agent_plays_legally_and_deterministically():
    agent = RuleAgent()
    for view, legal in random_positions(0, 300):
        choice = agent.decide(view, legal)
        assert choice in legal
        assert agent.decide(view, legal) == choice


def test_rule_agent_never_passes_on_lead(space):
    agent = RuleAgent()
    for view, legal in random_positions(1, 200):
        if view.to_beat_id is None:
            assert agent.decide(view, legal) != space.pass_id


def test_rule_agent_beats_incumbent_with_same_shape(space):
    agent = RuleAgent()
    for view, legal in random_positions(2, 300):
        if view.to_beat_id is None:
            continue
        choice = agent.decide(view, legal)
        if choice == space.pass_id:
            continue
        cat = int(space.category[choice])
        inc = int(space.category[view.to_beat_id])
        hand_size = int(view.hand.sum())
        same = (cat == inc
                and space.length[choice] == space.length[view.to_beat_id])
        assert same or (cat == 13 and hand_size == 4) \
            or (cat == 14 and hand_size == 2)


def test_random_agent_reset_replays_stream():
    agent = RandomAgent(seed=5)
    positions = random_positions(3, 40)
    first = [agent.decide(v, l) for v, l in positions]
    bids = [agent.bid(None, []) for _ in range(10)]
    agent.reset()
    assert [agent.decide(v, l) for v, l in positions] == first
    assert [agent.bid(None, []) for _ in range(10)] == bids


def test_rule_agent_bid_rule():
    agent = RuleAgent()
    assert agent.bid(parse_cards("BR334455667789TJQ"), [])
    assert agent.bid(parse_cards("3333445566778899T"), [])
    assert agent.bid(parse_cards("22334455667789TJQ"), [])
    assert not agent.bid(parse_cards("3456789TJQKA34567"), [])


def test_value_agent_argmax_consistency():
    agent = ValueAgent(make_nets("desk", seed=0))
    for view, legal in random_positions(4, 20):
        q = agent.q_values(view, legal)
        assert q.shape == (legal.size,)
        assert agent.decide(view, legal) == legal[int(np.argmax(q))]


def test_unsupported_surfaces():
    with pytest.raises(UnsupportedAgent):
        RandomAgent().q_values(None, None)
    with pytest.raises(UnsupportedAgent):
        RuleAgent().q_values(None, None)
    with pytest.raises(UnsupportedAgent):
        ValueAgent(make_nets("desk")).bid(np.zeros(15, dtype=np.int8), [])


@pytest.fixture(scope="module")
def checkpoint(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("ckpt") / "nets.ckpt")
    save_nets(make_nets("desk", seed=0), path)
    return path


def test_value_agent_from_checkpoint(checkpoint):
    agent = ValueAgent.from_checkpoint(checkpoint, preset="desk",
                                       name="loaded")
    assert agent.name == "loaded"
    view, legal = random_positions(5, 1)[0]
    assert agent.decide(view, legal) in legal


def test_agent_from_spec_forms(checkpoint):
    assert isinstance(agent_from_spec("random"), RandomAgent)
    named = agent_from_spec("random:7")
    assert named.seed == 7 and named.name == "random:7"
    assert isinstance(agent_from_spec("rule"), RuleAgent)
    dmc = agent_from_spec(f"dmc:{checkpoint}")
    assert isinstance(dmc, DMCAgent) and dmc.name == "dmc"
    sl = agent_from_spec(f"sl:{checkpoint}:desk")
    assert isinstance(sl, SLAgent) and sl.name == "sl"
    with pytest.raises(ValueError):
        agent_from_spec("dmc")
    with pytest.raises(ValueError):
        agent_from_spec("alphazero")


def test_load_bid_network_round_trip(tmp_path, checkpoint):
    net = BidNetwork(seed=3)
    path = str(tmp_path / "bid.ckpt")
    save_checkpoint(net.snapshot(), path)
    loaded = load_bid_network(path)
    for k, v in net.params().items():
        assert (v == loaded.params()[k]).all()
    agent = agent_from_spec(f"dmc:{checkpoint}", bid_path=path)
    hand = parse_cards("334455667789TJQKA")
    assert agent.bid(hand, []) in (True, False)
