"""Supervised move prediction from match logs.

Every decision point becomes one positive instance (the move actually
played) and one negative per other legal move, scored by the same
history+state+action value network and trained with class-weighted binary
cross-entropy. Prediction is argmax score over the legal moves.

Decisions are stored compactly (card counts and action ids, not feature
vectors) and re-encoded batch-wise; all instances of one decision share a
single LSTM pass over the common history, which is exact and much cheaper
than treating instances independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..cards import NUM_NONJOKER, full_deck
from ..combos import action_space
from ..encode import (CARD_VEC, HISTORY_MOVES, HISTORY_SHAPE, action_vectors,
                      state_width)
from ..game import GameState, Role
from ..matchlog import EmptyCorpus, MatchRecord
from ..nn.losses import check_finite, weighted_bce_with_logits
from ..nn.models import PRESETS, QNetwork, make_optimizer
from .episodes import make_nets


@dataclass
class SLConfig:
    preset: str = "desk"
    batch_instances: int = 8096
    epochs: int = 20
    val_frac: float = 0.1
    lr: float = 1e-4
    seed: int = 0
    max_batches_per_role: int | None = None   # cap for budgeted runs
    eval_decisions: int | None = None         # cap validation cost


class _Grower:
    """Append-only array with doubling capacity."""

    def __init__(self, shape_tail: tuple, dtype):
        self._arr = np.zeros((1024, *shape_tail), dtype=dtype)
        self.n = 0

    def append(self, row) -> None:
        if self.n == len(self._arr):
            self._arr = np.concatenate([self._arr, np.zeros_like(self._arr)])
        self._arr[self.n] = row
        self.n += 1

    def done(self) -> np.ndarray:
        return self._arr[:self.n]


@dataclass
class DecisionSet:
    """Compact per-position decision records for supervised training."""

    role: Role
    hand: np.ndarray          # (N, 15) own counts at decision time
    played: np.ndarray        # (N, 3, 15) per-seat cards already played
    counts: np.ndarray        # (N, 3) hand sizes
    bombs: np.ndarray         # (N,)
    to_beat: np.ndarray       # (N,) action id or -1
    last_move: np.ndarray     # (N, 3) per-seat last action id or -1
    hist: np.ndarray          # (N, 15) last move ids, -1 pad at the front
    legal_off: np.ndarray     # (N+1,)
    legal_ids: np.ndarray     # (total,) uint16
    chosen: np.ndarray        # (N,) index into the decision's legal slice

    def __len__(self) -> int:
        return len(self.hand)

    def group_sizes(self) -> np.ndarray:
        return np.diff(self.legal_off)


def build_decision_sets(records) -> dict[Role, DecisionSet]:
    """Replay records (landlord at seat 0) into per-position decision sets."""
    space = action_space()
    cols = {}
    for role in Role:
        cols[role] = dict(
            hand=_Grower((15,), np.int8), played=_Grower((3, 15), np.int8),
            counts=_Grower((3,), np.int16), bombs=_Grower((), np.int8),
            to_beat=_Grower((), np.int32), last_move=_Grower((3,), np.int32),
            hist=_Grower((15,), np.int16), chosen=_Grower((), np.int16),
            legal=[], lengths=_Grower((), np.int32))
    n_records = 0
    for rec in records:
        n_records += 1
        state = GameState(
            [rec.hands[Role.LANDLORD], rec.hands[Role.DOWN],
             rec.hands[Role.UP]],
            np.zeros(15, dtype=np.int8), landlord_seat=0)
        last = np.full(3, -1, dtype=np.int32)
        histv = np.full(HISTORY_MOVES, -1, dtype=np.int16)
        for role, cards in rec.moves:
            seat = int(role)
            aid = space.id_of(cards)
            legal = state.legal_action_ids()
            pos = int(np.searchsorted(legal, aid))
            if pos >= legal.size or legal[pos] != aid:
                raise ValueError("move not legal during replay")
            c = cols[role]
            c["hand"].append(state.hands[seat])
            c["played"].append(state.played)
            c["counts"].append(state.hand_counts())
            c["bombs"].append(state.bombs_played)
            c["to_beat"].append(-1 if state.to_beat_id is None
                                else state.to_beat_id)
            c["last_move"].append(last)
            c["hist"].append(histv)
            c["chosen"].append(pos)
            c["legal"].append(legal.astype(np.uint16))
            c["lengths"].append(legal.size)
            state.apply_action_id(int(aid), check=False)
            last[seat] = aid
            histv = np.roll(histv, -1)
            histv[-1] = aid
    if n_records == 0:
        raise EmptyCorpus("no game records supplied")
    out = {}
    for role in Role:
        c = cols[role]
        lengths = c["lengths"].done()
        off = np.zeros(len(lengths) + 1, dtype=np.int64)
        np.cumsum(lengths, out=off[1:])
        out[role] = DecisionSet(
            role=role, hand=c["hand"].done(), played=c["played"].done(),
            counts=c["counts"].done(), bombs=c["bombs"].done(),
            to_beat=c["to_beat"].done(), last_move=c["last_move"].done(),
            hist=c["hist"].done(), legal_off=off,
            legal_ids=(np.concatenate(c["legal"]) if c["legal"]
                       else np.zeros(0, dtype=np.uint16)),
            chosen=c["chosen"].done())
    return out


def _cards54(counts: np.ndarray) -> np.ndarray:
    """(n, 15) counts -> (n, 54) thermometer encoding."""
    n = counts.shape[0]
    out = np.zeros((n, CARD_VEC), dtype=np.float32)
    out[:, :52] = (counts[:, :NUM_NONJOKER, None]
                   > np.arange(4, dtype=np.int8)).reshape(n, 52)
    out[:, 52] = counts[:, 13] >= 1
    out[:, 53] = counts[:, 14] >= 1
    return out


def _id_vecs(ids: np.ndarray) -> np.ndarray:
    """Action-id array -> 54-wide vectors; -1 maps to the zero vector."""
    vecs = action_vectors()[np.maximum(ids, 0)]
    return vecs * (ids >= 0).astype(np.float32)[..., None]


def _one_hot_cols(values: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((values.shape[0], width), dtype=np.float32)
    ok = (values >= 0) & (values < width)
    out[np.nonzero(ok)[0], values[ok]] = 1.0
    return out


def encode_states_batch(ds: DecisionSet, idx: np.ndarray) -> np.ndarray:
    """Vectorized encode_state over the selected decisions."""
    hand = ds.hand[idx].astype(np.int16)
    played = ds.played[idx].astype(np.int16)
    union = (full_deck()[None, :].astype(np.int16)
             - hand - played.sum(axis=1)).astype(np.int16)
    to_beat = _id_vecs(ds.to_beat[idx])
    counts = ds.counts[idx]
    bombs = _one_hot_cols(ds.bombs[idx].astype(np.int64), 15)
    if ds.role == Role.LANDLORD:
        parts = [
            _cards54(hand), _cards54(union), to_beat,
            _cards54(played[:, 1]), _cards54(played[:, 2]),
            _one_hot_cols(counts[:, 1].astype(np.int64) - 1, 17),
            _one_hot_cols(counts[:, 2].astype(np.int64) - 1, 17),
            bombs,
        ]
    else:
        other = 2 if ds.role == Role.DOWN else 1
        last = ds.last_move[idx]
        parts = [
            _cards54(hand), _cards54(union), to_beat,
            _id_vecs(last[:, 0]), _id_vecs(last[:, other]),
            _cards54(played[:, 0]), _cards54(played[:, other]),
            _one_hot_cols(counts[:, 0].astype(np.int64) - 1, 20),
            _one_hot_cols(counts[:, other].astype(np.int64) - 1, 17),
            bombs,
        ]
    return np.concatenate(parts, axis=1)


def encode_history_batch(ds: DecisionSet, idx: np.ndarray) -> np.ndarray:
    return _id_vecs(ds.hist[idx].astype(np.int64)).reshape(
        -1, *HISTORY_SHAPE)


def _gather_legal(ds: DecisionSet, idx: np.ndarray):
    """Instance-level legal ids, group map, and label vector."""
    sizes = ds.group_sizes()[idx]
    chunks = [ds.legal_ids[ds.legal_off[i]:ds.legal_off[i + 1]] for i in idx]
    ids = np.concatenate(chunks).astype(np.int64)
    group = np.repeat(np.arange(len(idx)), sizes)
    labels = np.zeros(ids.size, dtype=np.float32)
    labels[np.concatenate([[0], np.cumsum(sizes)[:-1]]) + ds.chosen[idx]] = 1.0
    return ids, group, labels, sizes


def _forward_grouped(net: QNetwork, hist: np.ndarray, states: np.ndarray,
                     ids: np.ndarray, group: np.ndarray, train: bool):
    """Scores for all instances; LSTM runs once per decision."""
    h = net.lstm.forward(hist.astype(net.dtype, copy=False))
    left = np.concatenate([h, states.astype(net.dtype, copy=False)], axis=1)
    rows = np.concatenate(
        [left[group], action_vectors()[ids]], axis=1)
    if train:
        logits = net.mlp.forward(rows)[:, 0]
    else:
        x = rows
        for i, layer in enumerate(net.mlp.layers):
            if i:
                x = np.maximum(x, 0.0)
            x = x @ layer.W + layer.b
        logits = x[:, 0]
    return logits, left.shape[1]


def _backward_grouped(net: QNetwork, dlogits: np.ndarray,
                      group: np.ndarray, left_width: int,
                      n_dec: int) -> None:
    dx = net.mlp.backward(dlogits[:, None])
    dleft = np.zeros((n_dec, left_width), dtype=net.dtype)
    np.add.at(dleft, group, dx[:, :left_width])
    net.lstm.backward(dleft[:, :net.lstm_hidden])


def _accuracy(net: QNetwork, ds: DecisionSet, idx: np.ndarray,
              batch: int = 4096) -> float:
    hits = 0
    for lo in range(0, len(idx), batch):
        sel = idx[lo:lo + batch]
        hist = encode_history_batch(ds, sel)
        states = encode_states_batch(ds, sel)
        ids, group, _, sizes = _gather_legal(ds, sel)
        logits, _ = _forward_grouped(net, hist, states, ids, group,
                                     train=False)
        start = 0
        for d, size in enumerate(sizes):
            if int(np.argmax(logits[start:start + size])) == ds.chosen[sel[d]]:
                hits += 1
            start += size
    return hits / max(1, len(idx))


def train_sl(records=None, config: SLConfig | None = None,
             datasets: dict[Role, DecisionSet] | None = None,
             log=None) -> dict:
    """Returns {"nets", "accuracy", "history"}; nets are the best-validation
    snapshots per position."""
    config = config or SLConfig()
    if datasets is None:
        if records is None:
            raise EmptyCorpus("need records or prebuilt datasets")
        datasets = build_decision_sets(records)
    if all(len(ds) == 0 for ds in datasets.values()):
        raise EmptyCorpus("corpus contains no decisions")
    nets = make_nets(config.preset, seed=config.seed)
    rng = np.random.default_rng(config.seed)
    best = {}
    accuracy = {}
    history = []
    for role in Role:
        ds = datasets[role]
        net = nets[role]
        opt = make_optimizer(net, config.lr)
        n = len(ds)
        if n == 0:
            accuracy[role] = 0.0
            best[role] = net.snapshot()
            continue
        perm = rng.permutation(n)
        n_val = max(1, int(n * config.val_frac)) if n > 1 else 0
        val_idx, train_idx = perm[:n_val], perm[n_val:]
        if train_idx.size == 0:
            train_idx = perm
        eval_idx = val_idx if val_idx.size else train_idx
        if config.eval_decisions and eval_idx.size > config.eval_decisions:
            eval_idx = eval_idx[:config.eval_decisions]
        sizes = ds.group_sizes()
        total = int(sizes[train_idx].sum())
        n_pos = train_idx.size
        n_neg = max(1, total - n_pos)
        w_pos = total / (2.0 * n_pos)
        w_neg = total / (2.0 * n_neg)
        best_acc = -1.0
        best_snap = net.snapshot()
        batches_done = 0
        capped = False
        for epoch in range(config.epochs):
            order = rng.permutation(train_idx)
            lo = 0
            while lo < order.size:
                hi = lo
                inst = 0
                while hi < order.size and inst < config.batch_instances:
                    inst += int(sizes[order[hi]])
                    hi += 1
                sel = order[lo:hi]
                lo = hi
                hist = encode_history_batch(ds, sel)
                states = encode_states_batch(ds, sel)
                ids, group, labels, _ = _gather_legal(ds, sel)
                logits, left_w = _forward_grouped(net, hist, states, ids,
                                                  group, train=True)
                weights = np.where(labels > 0, w_pos, w_neg).astype(
                    logits.dtype)
                loss, dz = weighted_bce_with_logits(logits, labels, weights)
                check_finite(loss, "(sl step)")
                net.zero_grad()
                _backward_grouped(net, dz, group, left_w, sel.size)
                opt.step(net.params(), net.grads())
                batches_done += 1
                if (config.max_batches_per_role
                        and batches_done >= config.max_batches_per_role):
                    capped = True
                    break
            acc = _accuracy(net, ds, eval_idx)
            history.append((int(role), epoch, batches_done, float(acc)))
            if log:
                log(f"position {role.name}: epoch {epoch} "
                    f"batches {batches_done} val_acc {acc:.4f}")
            if acc > best_acc:
                best_acc = acc
                best_snap = net.snapshot()
            if capped:
                break
        net.load_snapshot(best_snap)
        best[role] = best_snap
        accuracy[role] = best_acc
    return {"nets": nets, "accuracy": accuracy, "history": history}


def save_decision_sets(datasets: dict[Role, DecisionSet], path: str) -> None:
    blob = {}
    for role, ds in datasets.items():
        p = f"r{int(role)}_"
        blob.update({
            p + "hand": ds.hand, p + "played": ds.played,
            p + "counts": ds.counts, p + "bombs": ds.bombs,
            p + "to_beat": ds.to_beat, p + "last_move": ds.last_move,
            p + "hist": ds.hist, p + "legal_off": ds.legal_off,
            p + "legal_ids": ds.legal_ids, p + "chosen": ds.chosen,
        })
    np.savez_compressed(path, **blob)


def load_decision_sets(path: str) -> dict[Role, DecisionSet]:
    blob = np.load(path)
    out = {}
    for role in Role:
        p = f"r{int(role)}_"
        out[role] = DecisionSet(
            role=role, hand=blob[p + "hand"], played=blob[p + "played"],
            counts=blob[p + "counts"], bombs=blob[p + "bombs"],
            to_beat=blob[p + "to_beat"], last_move=blob[p + "last_move"],
            hist=blob[p + "hist"], legal_off=blob[p + "legal_off"],
            legal_ids=blob[p + "legal_ids"], chosen=blob[p + "chosen"])
    return out
