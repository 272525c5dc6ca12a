"""Command-line entry points.

Subcommands: train, eval, enumerate, replay, bench, serve, sl-train,
bid-train.  Exit codes: 0 success, 1 runtime failure, 2 bad config or
missing artifact, 3 training halted on a non-finite loss, 4 action-table
self-check mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .agents import agent_from_spec
from .combos import action_space
from .config import InvalidRunConfig, RunConfig, load_run_config
from .moves import legal_ids

EXIT_CONFIG = 2
EXIT_HALTED = 3
EXIT_MISMATCH = 4

# expected combo-family sizes; enumerate double-checks these every run
EXPECTED_COUNTS = {
    "PASS": 1, "SOLO": 15, "PAIR": 13, "TRIO": 13, "TRIO_SOLO": 182,
    "TRIO_PAIR": 156, "CHAIN_SOLO": 36, "CHAIN_PAIR": 52, "CHAIN_TRIO": 45,
    "PLANE_SOLO": 21822, "PLANE_PAIR": 2939, "QUAD_SOLO": 1326,
    "QUAD_PAIR": 858, "BOMB": 13, "ROCKET": 1,
}
EXPECTED_TOTAL = 27472


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value config file")


def _overrides(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddz")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="self-play training run")
    _add_config_flag(p)
    p.add_argument("--objective", choices=["wp", "adp"], default=None)
    p.add_argument("--preset", choices=["desk", "full"], default=None)
    p.add_argument("--actors", type=int, default=None, dest="actors")
    p.add_argument("--frames", type=int, default=None, dest="total_frames")
    p.add_argument("--save-dir", default=None, dest="save_dir")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--sync-every", type=int, default=None, dest="sync_every")
    p.add_argument("--buffer-entries", type=int, default=None,
                   dest="buffer_entries")
    p.add_argument("--entry-size", type=int, default=None, dest="entry_size")
    p.add_argument("--batch-entries", type=int, default=None,
                   dest="batch_entries")
    p.add_argument("--checkpoint-interval", type=float, default=None,
                   dest="checkpoint_interval_s")
    p.add_argument("--resume", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="tournament evaluation")
    _add_config_flag(p)
    p.add_argument("--a", default=None, help="agent spec, e.g. dmc:path.ckpt")
    p.add_argument("--b", default=None)
    p.add_argument("--agents", default=None,
                   help="three comma-separated specs for --bidding")
    p.add_argument("--bidding", action="store_true")
    p.add_argument("--elo", action="store_true")
    p.add_argument("--decks", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--preset", choices=["desk", "full"], default=None)
    p.add_argument("--bid-checkpoint", default=None, dest="bid_checkpoint")
    p.add_argument("--out", default=None, help="report directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("enumerate", help="print and verify the action table")
    p.add_argument("--hand", default=None,
                   help="also count this hand's legal leads")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("replay", help="validate match logs")
    p.add_argument("path", help="log file, one match per line, - for stdin")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="per-step inference latency")
    p.add_argument("--agents", default="random,rule")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=["desk", "full"], default="desk")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="HTTP game service")
    _add_config_flag(p)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--bid-checkpoint", default=None, dest="bid_checkpoint")
    p.add_argument("--preset", choices=["desk", "full"], default=None)
    p.add_argument("--think-delay-ms", type=int, default=None,
                   dest="think_delay_ms")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("sl-train", help="imitation training from match logs")
    _add_config_flag(p)
    p.add_argument("--corpus", default=None)
    p.add_argument("--preset", choices=["desk", "full"], default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-instances", type=int, default=None,
                   dest="batch_instances")
    p.add_argument("--max-batches", type=int, default=None,
                   dest="max_batches")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="sl.ckpt")
    p.set_defaults(func=cmd_sl_train)

    p = sub.add_parser("bid-train", help="bid network from labeled hands")
    _add_config_flag(p)
    p.add_argument("--corpus", default=None, dest="bid_corpus")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="bid.ckpt")
    p.set_defaults(func=cmd_bid_train)

    return parser


def _run_config(args, keys) -> RunConfig:
    return load_run_config(getattr(args, "config", None),
                           overrides=_overrides(args, keys))


def cmd_train(args) -> int:
    from .training import TrainConfig, TrainHalted, train_dmc
    cfg = _run_config(args, ["objective", "preset", "actors", "total_frames",
                             "save_dir", "seed", "lr", "epsilon", "sync_every",
                             "buffer_entries", "entry_size", "batch_entries",
                             "checkpoint_interval_s"])
    tc = TrainConfig(
        objective=cfg.objective, preset=cfg.preset, num_actors=cfg.actors,
        total_frames=cfg.total_frames, save_dir=cfg.save_dir, seed=cfg.seed,
        lr=cfg.lr, epsilon=cfg.epsilon, sync_every=cfg.sync_every,
        buffer_entries=cfg.buffer_entries, entry_size=cfg.entry_size,
        batch_entries=cfg.batch_entries,
        checkpoint_interval_s=cfg.checkpoint_interval_s,
    )
    try:
        result = train_dmc(tc, resume=args.resume)
    except TrainHalted as halt:
        print(f"halted: {halt} (checkpoint: {halt.checkpoint_path})",
              file=sys.stderr)
        return EXIT_HALTED
    print(f"trained {result.frames} frames over {result.episodes} episodes "
          f"in {result.elapsed_s:.1f}s; final checkpoint "
          f"{result.checkpoint_path}")
    return 0


def _resolve_agent(spec: str, cfg: RunConfig):
    from .nn.checkpoint import CheckpointError
    try:
        return agent_from_spec(spec, preset=cfg.preset,
                               bid_path=cfg.bid_checkpoint or None)
    except (FileNotFoundError, CheckpointError) as exc:
        raise InvalidRunConfig(f"unusable checkpoint: {exc}") from exc
    except ValueError as exc:
        raise InvalidRunConfig(str(exc)) from exc


def cmd_eval(args) -> int:
    from .tournament import (bidding_tournament, elo, paired_deck_tournament,
                             write_report_csv, write_report_json)
    cfg = _run_config(args, ["decks", "seed", "workers", "preset",
                             "bid_checkpoint"])
    out_dir = args.out or "runs/eval"
    os.makedirs(out_dir, exist_ok=True)
    if args.bidding:
        if not args.agents or len(args.agents.split(",")) != 3:
            print("--bidding needs --agents A,B,C", file=sys.stderr)
            return EXIT_CONFIG
        algos = [_resolve_agent(s.strip(), cfg)
                 for s in args.agents.split(",")]
        report = bidding_tournament(algos, cfg.decks, seed=cfg.seed)
    else:
        if not args.a or not args.b:
            print("eval needs --a and --b agent specs (or --bidding)",
                  file=sys.stderr)
            return EXIT_CONFIG
        agent_a = _resolve_agent(args.a, cfg)
        agent_b = _resolve_agent(args.b, cfg)
        report = paired_deck_tournament(agent_a, agent_b, cfg.decks,
                                        seed=cfg.seed, workers=cfg.workers)
    write_report_csv(report, os.path.join(out_dir, "report.csv"))
    write_report_json(report, os.path.join(out_dir, "report.json"))
    for row in report.rows():
        print(json.dumps(row))
    if args.elo and not args.bidding:
        names = (report.agent_a, report.agent_b)
        ratings = elo((names[0], names[1], s) for s in report.deck_scores)
        with open(os.path.join(out_dir, "elo.json"), "w") as fh:
            json.dump(ratings, fh, indent=2)
        print(json.dumps({"elo": ratings}))
    return 0


def cmd_enumerate(args) -> int:
    space = action_space()
    counts = space.category_counts()
    width = max(len(k) for k in counts)
    total = 0
    ok = True
    for name, count in counts.items():
        expected = EXPECTED_COUNTS.get(name)
        mark = ""
        if expected != count:
            mark = f"  MISMATCH (expected {expected})"
            ok = False
        print(f"{name:<{width}}  {count:>6}{mark}")
        total += count
    print(f"{'Total':<{width}}  {total:>6}")
    if total != EXPECTED_TOTAL:
        print(f"total mismatch: expected {EXPECTED_TOTAL}", file=sys.stderr)
        ok = False
    if args.hand:
        from .cards import parse_cards
        hand = parse_cards(args.hand)
        n = len(legal_ids(hand, None))
        print(f"legal leads for {args.hand}: {n}")
    return 0 if ok else EXIT_MISMATCH


def cmd_replay(args) -> int:
    from .cards import format_cards
    from .matchlog import ParseError, IllegalReplay, parse_log, replay
    if args.path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(args.path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    failures = 0
    n = 0
    for i, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        n += 1
        try:
            state = replay(parse_log(line))
        except (ParseError, IllegalReplay, ValueError) as exc:
            print(f"line {i}: FAIL {exc}")
            failures += 1
            continue
        result = state.score()
        print(f"line {i}: OK winner={result.winner_side.name.lower()} "
              f"bombs={result.bombs} landlord_points={result.landlord_points:+g}")
    print(f"{n - failures}/{n} logs replayed clean")
    return 0 if failures == 0 and n > 0 else 1


def cmd_bench(args) -> int:
    from .tournament import inference_benchmark
    cfg = RunConfig(preset=args.preset)
    agents = {}
    for spec in args.agents.split(","):
        spec = spec.strip()
        agents[spec] = _resolve_agent(spec, cfg)
    report = inference_benchmark(agents, num_steps=args.steps, seed=args.seed)
    print(json.dumps(report, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import ServerSettings, create_app
    cfg = _run_config(args, ["host", "port", "checkpoint", "bid_checkpoint",
                             "preset", "think_delay_ms"])
    settings = ServerSettings(
        checkpoint=cfg.checkpoint or None,
        bid_checkpoint=cfg.bid_checkpoint or None,
        preset=cfg.preset,
        think_delay_ms=cfg.think_delay_ms,
    )
    app = create_app(settings)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="info")
    return 0


def cmd_sl_train(args) -> int:
    from .matchlog import record_games
    from .nn.checkpoint import save_checkpoint
    from .training import SLConfig, train_sl
    from .training.dmc import merged_params
    cfg = _run_config(args, ["corpus", "preset", "epochs", "batch_instances",
                             "max_batches", "seed"])
    if not cfg.corpus:
        print("sl-train needs --corpus", file=sys.stderr)
        return EXIT_CONFIG
    with open(cfg.corpus, "r", encoding="utf-8") as fh:
        records = record_games(fh)
    sl_cfg = SLConfig(preset=cfg.preset, epochs=cfg.epochs,
                      batch_instances=cfg.batch_instances,
                      max_batches_per_role=cfg.max_batches or None,
                      seed=cfg.seed)
    out = train_sl(records, sl_cfg, log=print)
    save_checkpoint(merged_params(out["nets"]), args.out)
    accuracy = {role.name.lower(): acc
                for role, acc in out["accuracy"].items()}
    print(json.dumps({"accuracy": accuracy, "checkpoint": args.out}))
    return 0


def cmd_bid_train(args) -> int:
    from .cards import parse_cards
    from .nn.checkpoint import save_checkpoint
    from .training import BidSample, train_bidding
    cfg = _run_config(args, ["bid_corpus", "epochs", "seed"])
    if not cfg.bid_corpus:
        print("bid-train needs --corpus", file=sys.stderr)
        return EXIT_CONFIG
    samples = []
    with open(cfg.bid_corpus, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            samples.append(BidSample(hand=parse_cards(row["hand"]),
                                     history=[bool(b) for b in row["history"]],
                                     label=float(row["label"])))
    out = train_bidding(samples, epochs=cfg.epochs, seed=cfg.seed, log=print)
    save_checkpoint(out["net"].params(), args.out)
    print(json.dumps({"accuracy": out["accuracy"], "checkpoint": args.out}))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidRunConfig as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
