"""Full imitation run: 50k rule-agent logs -> desk nets, then the bid net."""
import json
import time

from doudizhu.cards import parse_cards
from doudizhu.matchlog import record_games
from doudizhu.nn.checkpoint import save_checkpoint
from doudizhu.training import BidSample, SLConfig, train_bidding, train_sl
from doudizhu.training.dmc import merged_params

t0 = time.time()
with open("runs/sl_corpus.txt") as fh:
    records = record_games(fh)
print(f"parsed {len(records)} logs {time.time()-t0:.0f}s", flush=True)

cfg = SLConfig(preset="desk", epochs=10, batch_instances=8096,
               val_frac=0.02, lr=3e-4, seed=7,
               max_batches_per_role=3000, eval_decisions=20000)
out = train_sl(records, cfg, log=lambda m: print(m, flush=True))
save_checkpoint(merged_params(out["nets"]), "artifacts/sl_desk.ckpt")
print(json.dumps({str(int(r)): a for r, a in out["accuracy"].items()}))
print(f"sl done {time.time()-t0:.0f}s", flush=True)

samples = []
with open("runs/bid_corpus.jsonl") as fh:
    for line in fh:
        if not line.strip():
            continue
        row = json.loads(line)
        samples.append(BidSample(hand=parse_cards(row["hand"]),
                                 history=[bool(b) for b in row["history"]],
                                 label=float(row["label"])))
bid = train_bidding(samples, epochs=30, lr=3e-4, seed=7,
                    log=lambda m: print(m, flush=True))
save_checkpoint(bid["net"].params(), "artifacts/bid_mlp.ckpt")
print(json.dumps({"bid_accuracy": bid["accuracy"]}))
print(f"all done {time.time()-t0:.0f}s", flush=True)
