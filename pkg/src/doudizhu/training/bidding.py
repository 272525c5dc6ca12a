"""Bid/no-bid classifier training on labelled 17-card hands."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..encode import encode_bid
from ..nn.losses import check_finite, weighted_bce_with_logits
from ..nn.models import BidNetwork, make_optimizer
from .sl import EmptyCorpus


@dataclass
class BidSample:
    hand: np.ndarray            # 15 rank counts, 17 cards
    history: tuple              # bid decisions seen so far, True = bid
    label: float                # 1.0 take the landlord, 0.0 decline


def train_bidding(samples, epochs: int = 20, batch: int = 256,
                  lr: float = 1e-4, val_frac: float = 0.1,
                  seed: int = 0, log=None) -> dict:
    samples = list(samples)
    if not samples:
        raise EmptyCorpus("no bid samples")
    x = np.stack([encode_bid(s.hand, s.history) for s in samples])
    y = np.array([s.label for s in samples], dtype=np.float32)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(samples))
    n_val = int(len(samples) * val_frac)
    val, train = perm[:n_val], perm[n_val:]
    if train.size == 0:
        train = perm
    eval_idx = val if val.size else train
    net = BidNetwork(x.shape[1], seed=seed)
    opt = make_optimizer(net, lr)
    weights = np.ones(1, dtype=np.float32)
    best_acc = -1.0
    best = net.snapshot()
    history = []
    for epoch in range(epochs):
        order = rng.permutation(train)
        for lo in range(0, order.size, batch):
            sel = order[lo:lo + batch]
            z = net.logits(x[sel])
            loss, dz = weighted_bce_with_logits(
                z, y[sel], np.broadcast_to(weights, z.shape))
            check_finite(loss, "(bid step)")
            net.zero_grad()
            net.backward(dz)
            opt.step(net.params(), net.grads())
        pred = net.forward(x[eval_idx]) > 0.5
        acc = float((pred == (y[eval_idx] > 0.5)).mean())
        history.append((epoch, acc))
        if log:
            log(f"bid epoch {epoch}: val_acc {acc:.4f}")
        if acc > best_acc:
            best_acc = acc
            best = net.snapshot()
    net.load_snapshot(best)
    return {"net": net, "accuracy": best_acc, "history": history}
