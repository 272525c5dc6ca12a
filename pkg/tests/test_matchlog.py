import numpy as np
import pytest

from doudizhu.agents import RandomAgent
from doudizhu.game import Role, Side
from doudizhu.matchlog import (EmptyCorpus, IllegalReplay, MatchRecord,
                               ParseError, format_log, parse_log,
                               record_games, replay)
from doudizhu.tournament import run_match

from conftest import REPLAY_CORPUS


def sample_record(seed=0):
    out = run_match([RandomAgent(seed), RandomAgent(seed + 1),
                     RandomAgent(seed + 2)],
                    np.random.default_rng(seed))
    return out.record


def test_round_trip_random_games():
    for seed in range(5):
        rec = sample_record(seed)
        back = parse_log(format_log(rec))
        for role in Role:
            assert (back.hands[role] == rec.hands[role]).all()
        assert len(back.moves) == len(rec.moves)
        for (r1, c1), (r2, c2) in zip(back.moves, rec.moves):
            assert r1 == r2 and (c1 == c2).all()


def test_seed_prefix_round_trip():
    rec = sample_record(3)
    rec.seed = 123456789
    line = format_log(rec)
    assert line.startswith("#seed:123456789 H:")
    assert parse_log(line).seed == 123456789


def test_pass_token():
    rec = sample_record(1)
    line = format_log(rec)
    parsed = parse_log(line)
    has_pass = any(not c.any() for _, c in parsed.moves)
    if has_pass:
        assert ", D:P" in line or ", U:P" in line or ", L:P" in line


def test_up_pass_parses_to_up_seat():
    rec = sample_record(0)
    line = format_log(rec).split(",")[0] + ", L:3"
    # craft a minimal legal-looking prefix; only parsing is at stake here
    parsed = parse_log(line + ", D:P, U:P")
    assert parsed.moves[1] == (Role.DOWN, parsed.moves[1][1])
    assert parsed.moves[2][0] == Role.UP
    assert not parsed.moves[2][1].any()


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_log("not a log")
    with pytest.raises(ParseError):
        parse_log("H:33;44")                      # two hands only
    with pytest.raises(ParseError):
        parse_log("H:" + "3" * 5 + ";" + "4" * 17 + ";" + "5" * 17)
    rec = sample_record(2)
    line = format_log(rec)
    with pytest.raises(ParseError):
        parse_log(line.replace("L:", "X:", 1))
    with pytest.raises(ParseError):
        parse_log(line + ", L:ZZ")


def test_replay_validates_turn_order():
    rec = sample_record(4)
    rec.moves[0] = (Role.DOWN, rec.moves[0][1])   # landlord leads first
    with pytest.raises(IllegalReplay):
        replay(rec)


def test_replay_rejects_illegal_move():
    rec = sample_record(5)
    # replace the first move with cards the landlord cannot hold twice over
    bad = np.zeros(15, dtype=np.int8)
    bad[0] = 4
    if rec.hands[Role.LANDLORD][0] != 4:
        rec.moves[0] = (Role.LANDLORD, bad)
        with pytest.raises(IllegalReplay):
            replay(rec)


def test_replay_rejects_non_combo():
    rec = sample_record(6)
    bad = np.zeros(15, dtype=np.int8)
    bad[0] = 1
    bad[5] = 1                                    # 3 + 8 is no combo
    rec.moves[0] = (Role.LANDLORD, bad)
    with pytest.raises(IllegalReplay):
        replay(rec)


def test_replay_rejects_moves_after_finish():
    rec = sample_record(7)
    rec.moves.append(rec.moves[-1])
    with pytest.raises(IllegalReplay):
        replay(rec)


def test_emitted_logs_replay_clean():
    for seed in range(8):
        rec = sample_record(seed)
        final = replay(parse_log(format_log(rec)))
        assert final.winner_seat is not None


def test_replay_corpus_fixture():
    with open(REPLAY_CORPUS, "r", encoding="utf-8") as fh:
        records = record_games(fh)
    assert len(records) == 41
    for rec in records:
        final = replay(rec)
        last_role = rec.moves[-1][0]
        winner = final.winner_side
        if last_role == Role.LANDLORD:
            assert winner == Side.LANDLORD
        else:
            assert winner == Side.PEASANTS


def test_record_games_skips_comments():
    rec = sample_record(8)
    lines = ["# a comment", "", format_log(rec), "   "]
    parsed = record_games(lines)
    assert len(parsed) == 1


def test_record_games_keeps_seed_lines():
    rec = sample_record(9)
    rec.seed = 7
    parsed = record_games([format_log(rec)])
    assert parsed[0].seed == 7


def test_empty_corpus_type():
    assert issubclass(EmptyCorpus, ValueError)
