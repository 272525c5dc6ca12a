import io
import json
import os

import numpy as np
import pytest

import doudizhu.cli as cli
from doudizhu.agents import RandomAgent, RuleAgent
from doudizhu.cli import main
from doudizhu.tournament import run_match

from conftest import REPLAY_CORPUS


def test_enumerate_table(capsys):
    assert main(["enumerate"]) == 0
    out = capsys.readouterr().out
    assert "Total" in out and "27472" in out
    assert "MISMATCH" not in out
    for name in ("PLANE_SOLO", "ROCKET", "PASS"):
        assert name in out


def test_enumerate_hand_flag(capsys):
    assert main(["enumerate", "--hand", "33445566"]) == 0
    out = capsys.readouterr().out
    assert "legal leads for 33445566:" in out


def test_enumerate_mismatch_exit_code(monkeypatch, capsys):
    monkeypatch.setitem(cli.EXPECTED_COUNTS, "BOMB", 12)
    assert main(["enumerate"]) == cli.EXIT_MISMATCH
    assert "MISMATCH" in capsys.readouterr().out


def test_replay_corpus_clean(capsys):
    assert main(["replay", str(REPLAY_CORPUS)]) == 0
    out = capsys.readouterr().out
    assert "41/41 logs replayed clean" in out
    assert "FAIL" not in out


def test_replay_reports_failures(tmp_path, capsys):
    good = run_match([RandomAgent(0), RandomAgent(1), RandomAgent(2)],
                     np.random.default_rng(0)).log_line()
    path = tmp_path / "logs.txt"
    path.write_text(good + "\n" + good.replace(":", ";", 1) + "\n")
    assert main(["replay", str(path)]) == 1
    out = capsys.readouterr().out
    assert "1/2 logs replayed clean" in out
    assert "FAIL" in out


def test_replay_empty_file_fails(tmp_path, capsys):
    path = tmp_path / "logs.txt"
    path.write_text("# only a comment\n\n")
    assert main(["replay", str(path)]) == 1


def test_replay_missing_file_is_config_error(capsys):
    assert main(["replay", "/no/such/corpus.txt"]) == cli.EXIT_CONFIG


def test_replay_from_stdin(monkeypatch, capsys):
    good = run_match([RuleAgent(), RuleAgent(), RuleAgent()],
                     np.random.default_rng(1)).log_line()
    monkeypatch.setattr("sys.stdin", io.StringIO(good + "\n"))
    assert main(["replay", "-"]) == 0
    assert "1/1 logs replayed clean" in capsys.readouterr().out


def test_eval_requires_agent_specs(capsys):
    assert main(["eval"]) == cli.EXIT_CONFIG
    assert main(["eval", "--bidding"]) == cli.EXIT_CONFIG


def test_eval_paired(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    rc = main(["eval", "--a", "rule", "--b", "random:1", "--decks", "3",
               "--seed", "5", "--out", str(out_dir)])
    assert rc == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [r["role"] for r in lines] == ["landlord", "peasant", "overall"]
    assert os.path.exists(out_dir / "report.csv")
    assert os.path.exists(out_dir / "report.json")


def test_eval_elo_output(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    rc = main(["eval", "--a", "rule", "--b", "random:1", "--decks", "3",
               "--elo", "--out", str(out_dir)])
    assert rc == 0
    assert os.path.exists(out_dir / "elo.json")
    ratings = json.load(open(out_dir / "elo.json"))
    assert set(ratings) == {"rule", "random:1"}
    assert sum(ratings.values()) == pytest.approx(2000.0)


def test_eval_bidding(tmp_path, capsys):
    out_dir = tmp_path / "rep"
    rc = main(["eval", "--bidding", "--agents", "rule,random:1,random:2",
               "--decks", "1", "--out", str(out_dir)])
    assert rc == 0
    rows = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert len(rows) == 3
    assert all(r["games"] == 6 for r in rows)


def test_eval_missing_checkpoint_is_config_error(tmp_path, capsys):
    rc = main(["eval", "--a", "dmc:/no/such.ckpt", "--b", "rule",
               "--decks", "1", "--out", str(tmp_path)])
    assert rc == cli.EXIT_CONFIG
    assert "unusable checkpoint" in capsys.readouterr().err


def test_train_tiny_run(tmp_path, capsys):
    save = tmp_path / "run"
    rc = main(["train", "--actors", "0", "--frames", "40",
               "--save-dir", str(save), "--epsilon", "1.0",
               "--entry-size", "10", "--batch-entries", "2",
               "--buffer-entries", "4", "--checkpoint-interval", "1e9"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "trained" in out and "final checkpoint" in out
    assert os.path.exists(save / "model_latest.ckpt")
    assert os.path.exists(save / "train_stats.csv")


def test_train_halt_exit_code(tmp_path, capsys):
    save = tmp_path / "run"
    rc = main(["train", "--actors", "0", "--frames", "100000",
               "--save-dir", str(save), "--epsilon", "1.0", "--lr", "1e8",
               "--entry-size", "10", "--batch-entries", "2",
               "--buffer-entries", "4"])
    assert rc == cli.EXIT_HALTED
    assert "halted" in capsys.readouterr().err
    assert os.path.exists(save / "model_halt.ckpt")


def test_train_resume_flag(tmp_path, capsys):
    first = tmp_path / "one"
    assert main(["train", "--actors", "0", "--frames", "40",
                 "--save-dir", str(first), "--epsilon", "1.0",
                 "--entry-size", "10", "--batch-entries", "2",
                 "--buffer-entries", "4"]) == 0
    second = tmp_path / "two"
    rc = main(["train", "--actors", "0", "--frames", "40",
               "--save-dir", str(second), "--epsilon", "1.0",
               "--entry-size", "10", "--batch-entries", "2",
               "--buffer-entries", "4",
               "--resume", str(first / "model_latest.ckpt")])
    assert rc == 0


def test_bad_config_file_exit(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("decs = 4\n")
    assert main(["train", "--config", str(conf)]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def write_corpus(tmp_path, n=4):
    lines = []
    for i in range(n):
        out = run_match([RuleAgent(), RandomAgent(i), RandomAgent(i + 50)],
                        np.random.default_rng(i))
        lines.append(out.log_line())
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_sl_train_cli(tmp_path, capsys):
    corpus = write_corpus(tmp_path)
    ckpt = tmp_path / "sl.ckpt"
    rc = main(["sl-train", "--corpus", str(corpus), "--epochs", "1",
               "--batch-instances", "128", "--max-batches", "2",
               "--out", str(ckpt)])
    assert rc == 0
    assert os.path.exists(ckpt)
    tail = capsys.readouterr().out.strip().splitlines()[-1]
    payload = json.loads(tail)
    assert payload["checkpoint"] == str(ckpt)
    assert set(payload["accuracy"]) == {"landlord", "down", "up"}


def test_sl_train_needs_corpus(capsys):
    assert main(["sl-train"]) == cli.EXIT_CONFIG


def test_bid_train_cli(tmp_path, capsys):
    rows = []
    rng = np.random.default_rng(0)
    for i in range(12):
        pool = np.repeat(np.arange(13), 4)
        picks = rng.permutation(pool)[:17]
        counts = np.bincount(picks, minlength=15)
        from doudizhu.cards import format_cards
        rows.append(json.dumps({
            "hand": format_cards(counts.astype(np.int8)),
            "history": [True] if i % 3 == 0 else [],
            "label": i % 2,
        }))
    corpus = tmp_path / "bids.jsonl"
    corpus.write_text("\n".join(rows) + "\n")
    ckpt = tmp_path / "bid.ckpt"
    rc = main(["bid-train", "--corpus", str(corpus), "--epochs", "1",
               "--out", str(ckpt)])
    assert rc == 0
    assert os.path.exists(ckpt)


def test_bid_train_needs_corpus(capsys):
    assert main(["bid-train"]) == cli.EXIT_CONFIG


def test_bench_small(capsys):
    rc = main(["bench", "--steps", "300", "--agents", "random,rule"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["agents"]) == {"random", "rule"}
    assert sum(report["move_count_histogram"]) == 300
