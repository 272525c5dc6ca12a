import numpy as np
import pytest

from doudizhu.cards import deal, full_deck, parse_cards
from doudizhu.combos import action_space
from doudizhu.game import (GameState, IllegalMove, MatchResult, Phase,
                           PhaseError, Role, Side, game_stake,
                           terminal_reward)


def fresh_deal(seed=0, landlord_seat=0):
    hands, kitty = deal(np.random.default_rng(seed))
    return GameState(hands, kitty, landlord_seat=landlord_seat)


def random_playout(state, seed=0):
    rng = np.random.default_rng(seed)
    while state.winner_seat is None:
        legal = state.legal_action_ids()
        state.apply_action_id(int(rng.choice(legal)))
    return state


# --- construction and roles ------------------------------------------------

def test_landlord_gets_kitty():
    hands, kitty = deal(np.random.default_rng(1))
    st = GameState(hands, kitty, landlord_seat=2)
    assert st.hands[2].sum() == 20
    assert st.hands[0].sum() == st.hands[1].sum() == 17
    assert st.to_move == 2
    assert st.phase == Phase.PLAYING


def test_roles_relative_to_landlord():
    st = fresh_deal(landlord_seat=1)
    assert st.role_of(1) == Role.LANDLORD
    assert st.role_of(2) == Role.DOWN
    assert st.role_of(0) == Role.UP
    assert st.seat_of(Role.DOWN) == 2
    assert st.side_of(1) == Side.LANDLORD
    assert st.side_of(0) == Side.PEASANTS


def test_needs_landlord_or_bidder():
    hands, kitty = deal(np.random.default_rng(2))
    with pytest.raises(ValueError):
        GameState(hands, kitty)


# --- trick mechanics -------------------------------------------------------

def test_card_conservation_through_playout():
    st = random_playout(fresh_deal(3), seed=3)
    total = st.hands.sum(axis=0) + st.played.sum(axis=0)
    assert (total == full_deck()).all()


def test_double_pass_resets_trick(space):
    st = fresh_deal(4)
    lead = int(st.legal_action_ids()[-1])
    st.apply_action_id(lead)
    st.apply_action_id(space.pass_id)
    st.apply_action_id(space.pass_id)
    assert st.to_beat_id is None
    assert st.to_move == 0          # trick owner leads again
    assert st.pass_count == 0


def test_winner_on_last_card():
    st = random_playout(fresh_deal(5), seed=5)
    assert st.phase == Phase.FINISHED
    assert st.hands[st.winner_seat].sum() == 0
    assert st.to_move is None
    assert st.winner_side == st.side_of(st.winner_seat)


def test_illegal_move_rejected(space):
    st = fresh_deal(6)
    with pytest.raises(IllegalMove):
        st.apply_action_id(space.pass_id)   # leader may not pass


def test_legal_ids_outside_play_raises():
    hands, kitty = deal(np.random.default_rng(7))
    st = GameState(hands, kitty, first_bidder=0)
    with pytest.raises(PhaseError):
        st.legal_action_ids()


def test_clone_is_independent():
    st = fresh_deal(8)
    cp = st.clone()
    st.apply_action_id(int(st.legal_action_ids()[0]))
    assert len(cp.history) == 0
    assert cp.hands[0].sum() == 20


# --- bidding protocol ------------------------------------------------------

def bidding_state(seed=0, first_bidder=0):
    hands, kitty = deal(np.random.default_rng(seed))
    return GameState(hands, kitty, first_bidder=first_bidder)


def test_all_nobid_flags_redeal():
    st = bidding_state()
    for _ in range(3):
        st.bidding_step(False)
    assert st.phase == Phase.REDEAL
    assert st.bidder is None
    assert [b for _, b in st.bid_decisions] == [False, False, False]


def test_single_bid_two_nobid():
    st = bidding_state(first_bidder=1)
    before = st.hands[1].sum()
    st.bidding_step(True)     # seat 1 bids
    st.bidding_step(False)    # seat 2 declines
    st.bidding_step(False)    # seat 0 declines
    assert st.phase == Phase.PLAYING
    assert st.landlord_seat == 1
    assert st.hands[1].sum() == before + 3 == 20
    assert st.to_move == 1


def test_bid_then_one_outbid():
    st = bidding_state(first_bidder=0)
    st.bidding_step(True)     # seat 0 opens
    st.bidding_step(True)     # seat 1 outbids
    st.bidding_step(False)    # seat 2 declines
    assert st.landlord_seat == 1


def test_opener_nobid_passes_on():
    st = bidding_state(first_bidder=2)
    st.bidding_step(False)    # seat 2 declines
    assert st.bidder == 0
    st.bidding_step(True)     # seat 0 opens
    assert st.bidder == 1     # outbid round in turn order
    st.bidding_step(False)
    assert st.bidder == 2
    st.bidding_step(True)     # seat 2 takes it with the last word
    assert st.phase == Phase.PLAYING
    assert st.landlord_seat == 2


def test_bidding_records_at_most_five_decisions():
    st = bidding_state(first_bidder=0)
    st.bidding_step(False)    # seat 0 declines
    st.bidding_step(False)    # seat 1 declines
    st.bidding_step(True)     # seat 2 opens
    st.bidding_step(True)     # seat 0 outbids
    assert st.phase == Phase.BIDDING   # seat 1 still has its chance
    st.bidding_step(False)
    assert st.phase == Phase.PLAYING
    assert st.landlord_seat == 0
    assert len(st.bid_decisions) == 5
    assert st.bid_decisions[0] == (0, False)
    assert st.bid_decisions[2] == (2, True)


def test_bidding_step_wrong_phase():
    st = fresh_deal(9)
    with pytest.raises(PhaseError):
        st.bidding_step(True)


# --- scoring ---------------------------------------------------------------

def padded(hand_text, need):
    """Pad a hand with low filler cards to the required count."""
    counts = parse_cards(hand_text)
    filler = "3456789TJQKA"
    i = 0
    while counts.sum() < need:
        c = parse_cards(filler[i % 12])
        if (counts + c <= full_deck()).all():
            counts += c
        i += 1
    from doudizhu.cards import format_cards
    return format_cards(counts)


def test_game_stake_doubles_per_bomb():
    assert [game_stake(b) for b in range(4)] == [1, 2, 4, 8]


def test_score_landlord_win_no_bombs():
    st = GameState([parse_cards("33"), parse_cards(padded("", 17)),
                    parse_cards(padded("", 17))],
                   np.zeros(15, dtype=np.int8), landlord_seat=0)
    st.apply_action_id(int(action_space().id_of(parse_cards("33"))))
    assert st.winner_side == Side.LANDLORD
    r = st.score()
    assert (r.landlord_points, r.peasant_team_points) == (2.0, -2.0)
    assert r.bombs == 0


def build_bomb_game(num_bombs):
    """Small legal game where the landlord wins after num_bombs bombs."""
    bombs = ["4444", "5555"][:num_bombs]
    lhand = "".join(bombs) + "3"
    lmoves = bombs + ["3"]
    st = GameState([parse_cards(lhand), parse_cards(padded("", 17)),
                    parse_cards(padded("", 17))],
                   np.zeros(15, dtype=np.int8), landlord_seat=0)
    space = action_space()
    for move in lmoves:
        st.apply_action_id(space.id_of(parse_cards(move)))
        if st.winner_seat is not None:
            break
        st.apply_action_id(space.pass_id)
        st.apply_action_id(space.pass_id)
    return st


@pytest.mark.parametrize("bombs,stake", [(0, 1), (1, 2), (2, 4)])
def test_score_stakes_with_bombs(bombs, stake):
    st = build_bomb_game(bombs)
    result = st.score()
    assert result.winner_side == Side.LANDLORD
    assert result.bombs == bombs
    assert result.landlord_points == 2 * stake
    assert result.peasant_team_points == -2 * stake


def test_score_zero_sum_over_random_games():
    for seed in range(10):
        st = random_playout(fresh_deal(seed), seed=seed)
        r = st.score()
        assert r.landlord_points + r.peasant_team_points == 0


def test_score_peasants_win_two_bombs():
    # constructed: down plays two bombs then runs out
    st = GameState([parse_cards(padded("", 20)),
                    parse_cards("444455553"),
                    parse_cards(padded("", 17))],
                   np.zeros(15, dtype=np.int8), landlord_seat=0)
    space = action_space()
    lead = int(st.legal_action_ids()[1])  # cheapest real lead
    st.apply_action_id(lead)
    for move in ["4444", "5555", "3"]:
        if st.to_move != 1:
            st.apply_action_id(space.pass_id)
            continue
        st.apply_action_id(space.id_of(parse_cards(move)))
        if st.winner_seat is not None:
            break
        st.apply_action_id(space.pass_id)
        st.apply_action_id(space.pass_id)
    assert st.winner_side == Side.PEASANTS
    r = st.score()
    assert r.bombs == 2
    assert r.landlord_points == -8
    assert r.peasant_team_points == 8


def test_ladder_score_rocket_plus_solo():
    """Winner whose only plays were one rocket and one solo scores 2.17."""
    st = GameState([parse_cards("BR3"), parse_cards(padded("", 17)),
                    parse_cards(padded("", 17))],
                   np.zeros(15, dtype=np.int8), landlord_seat=0)
    space = action_space()
    st.apply_action_id(space.rocket_id)
    st.apply_action_id(space.pass_id)
    st.apply_action_id(space.pass_id)
    st.apply_action_id(space.id_of(parse_cards("3")))
    r = st.score()
    assert r.winner_side == Side.LANDLORD
    assert round(r.botzone_landlord, 2) == 2.17
    assert round(r.botzone_peasants, 2) == 0.0


def test_ladder_score_peasants_average():
    """Each peasant's own plays count; the side score is their average."""
    st = GameState([parse_cards(padded("55", 20)),
                    parse_cards("663" + padded("", 14)[:14]),
                    parse_cards(padded("", 17))],
                   np.zeros(15, dtype=np.int8), landlord_seat=0)
    space = action_space()
    # landlord leads a pair, down beats with 66 and wins later
    st.apply_action_id(space.id_of(parse_cards("55")))
    st.apply_action_id(space.id_of(parse_cards("66")))
    # play out the rest randomly; just verify the averaging identity
    st = random_playout(st, seed=11)
    r = st.score()
    weights = {0: 0.0, 1: 0.0, 2: 0.0}
    from doudizhu.game import CATEGORY_WEIGHTS
    from doudizhu.combos import Category
    for seat, aid in st.history:
        weights[seat] += CATEGORY_WEIGHTS[
            Category(int(space.category[aid]))]
    win_p = 2.0 if r.winner_side == Side.PEASANTS else 0.0
    expect = (win_p + weights[1] / 100.0 + win_p + weights[2] / 100.0) / 2.0
    assert abs(r.botzone_peasants - expect) < 1e-9


def test_score_requires_finished():
    with pytest.raises(PhaseError):
        fresh_deal(12).score()


# --- terminal rewards ------------------------------------------------------

def result(winner, bombs):
    lp = 2.0 * game_stake(bombs) * (1 if winner == Side.LANDLORD else -1)
    return MatchResult(winner_side=winner, bombs=bombs, landlord_points=lp,
                       peasant_team_points=-lp, botzone_landlord=0.0,
                       botzone_peasants=0.0)


def test_terminal_reward_wp():
    r = result(Side.PEASANTS, 0)
    assert terminal_reward(r, "wp", Role.DOWN) == 1.0
    assert terminal_reward(r, "wp", Role.UP) == 1.0
    assert terminal_reward(r, "wp", Role.LANDLORD) == -1.0


def test_terminal_reward_adp():
    assert terminal_reward(result(Side.LANDLORD, 1), "adp",
                           Role.LANDLORD) == 4.0
    assert terminal_reward(result(Side.LANDLORD, 0), "adp",
                           Role.DOWN) == -1.0
    assert terminal_reward(result(Side.PEASANTS, 3), "adp",
                           Role.UP) == 8.0


def test_terminal_reward_zero_sum_adp():
    for winner in Side:
        for bombs in range(4):
            r = result(winner, bombs)
            total = (terminal_reward(r, "adp", Role.LANDLORD)
                     + terminal_reward(r, "adp", Role.DOWN)
                     + terminal_reward(r, "adp", Role.UP))
            assert total == 0.0


def test_terminal_reward_unknown_objective():
    with pytest.raises(ValueError):
        terminal_reward(result(Side.LANDLORD, 0), "points", Role.LANDLORD)
