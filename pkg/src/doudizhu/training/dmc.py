"""Monte-Carlo value training: parallel actors, shared buffers, one learner.

Actors self-play with epsilon-greedy local copies of the three position
networks, turn finished episodes into return-labelled instances, and flush
them in S-sized entries into the per-position buffers. The learner samples
M entries at a time (M*S instances), runs one mean-squared-error step on
that position's network, frees the entries, and periodically checkpoints.

num_actors=0 selects a fully in-process mode: one loop alternates between
generating episodes and consuming batches with identical flush and batch
semantics, so fixed-seed runs are bit-reproducible.
"""
from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field
import multiprocessing as mp

import numpy as np

from ..encode import HISTORY_SHAPE, state_width
from ..game import Role
from ..nn.checkpoint import save_checkpoint, load_checkpoint
from ..nn.losses import NonFiniteLoss
from ..nn.models import QNetwork, make_optimizer, train_step_mse
from .buffers import ParamStore, SharedBuffer
from .config import TrainConfig
from .episodes import make_nets, play_episode

ROLE_KEYS = {Role.LANDLORD: "L", Role.DOWN: "D", Role.UP: "U"}
STAT_FIELDS = ("wall_clock_s", "frames", "position", "loss", "mean_target")


class TrainHalted(RuntimeError):
    """Loss went non-finite; the pre-step checkpoint path is attached."""

    def __init__(self, message: str, checkpoint_path: str):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path


@dataclass
class TrainResult:
    frames: int
    episodes: int
    elapsed_s: float
    checkpoint_path: str
    stat_path: str
    checkpoints: list = field(default_factory=list)


def merged_params(nets: dict[Role, QNetwork]) -> dict[str, np.ndarray]:
    return {f"{ROLE_KEYS[r]}.{k}": v
            for r in Role for k, v in nets[r].params().items()}


def save_nets(nets: dict[Role, QNetwork], path: str) -> None:
    save_checkpoint(merged_params(nets), path)


def load_nets(nets: dict[Role, QNetwork], path: str) -> None:
    tensors = load_checkpoint(path)
    current = merged_params(nets)
    if set(tensors) != set(current):
        raise ValueError(f"checkpoint names do not match networks: {path}")
    for name, arr in current.items():
        arr[...] = tensors[name].reshape(arr.shape)


class _StatWriter:
    def __init__(self, path: str):
        self.path = path
        fresh = not os.path.exists(path)
        self._fh = open(path, "a", newline="")
        self._csv = csv.writer(self._fh)
        if fresh:
            self._csv.writerow(STAT_FIELDS)

    def row(self, wall: float, frames: int, position: str, loss: float,
            mean_target: float) -> None:
        self._csv.writerow([f"{wall:.3f}", frames, position,
                            f"{loss:.6g}", f"{mean_target:.6g}"])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()


def actor_loop(config: TrainConfig, buffers: dict[Role, SharedBuffer],
               store: ParamStore, stop, actor_id: int) -> None:
    rng = np.random.default_rng(config.seed + 1000 * actor_id + 1)
    nets = make_nets(config.preset, seed=config.seed)
    params = merged_params(nets)
    version = store.pull(params, -1)
    pend: dict[Role, list] = {r: [] for r in Role}
    episodes = 0
    S = config.entry_size
    while not stop.is_set():
        if episodes % config.sync_every == 0:
            version = store.pull(params, version)
        rec = play_episode(nets, config.epsilon, rng, config.objective)
        rets = rec.returns(config.gamma)
        for role in Role:
            stream = pend[role]
            stream.extend(zip(rec.histories[role], rec.states[role],
                              rec.actions[role], rets[role]))
            while len(stream) >= S:
                idx = None
                while idx is None:
                    if stop.is_set():
                        return
                    idx = buffers[role].acquire_free(timeout=0.2)
                chunk, pend[role] = stream[:S], stream[S:]
                stream = pend[role]
                buffers[role].write_entry(
                    idx,
                    [c[0] for c in chunk], [c[1] for c in chunk],
                    [c[2] for c in chunk], [c[3] for c in chunk])
                buffers[role].commit(idx)
        episodes += 1


def _checkpoint_name(save_dir: str, frames: int) -> str:
    return os.path.join(save_dir, f"model_{frames:012d}.ckpt")


def learner_loop(config: TrainConfig, buffers: dict[Role, SharedBuffer],
                 nets: dict[Role, QNetwork], store: ParamStore | None,
                 stop, stats: _StatWriter, save_dir: str) -> TrainResult:
    opts = {r: make_optimizer(nets[r], config.lr) for r in Role}
    pending: dict[Role, list] = {r: [] for r in Role}
    frames = 0
    start = time.monotonic()
    last_ckpt = start
    checkpoints: list[str] = []
    latest = os.path.join(save_dir, "model_latest.ckpt")
    M, S = config.batch_entries, config.entry_size
    try:
        while frames < config.total_frames and not stop.is_set():
            progressed = False
            for role in Role:
                buf = buffers[role]
                while len(pending[role]) < M:
                    idx = buf.pop_full(timeout=0.0)
                    if idx is None:
                        break
                    pending[role].append(idx)
                if len(pending[role]) < M:
                    continue
                take, pending[role] = pending[role][:M], pending[role][M:]
                hist, state, act, tgt = buf.read_entries(take)
                rows = np.concatenate([state, act], axis=1)
                loss = train_step_mse(
                    nets[role], opts[role],
                    hist.reshape(-1, *HISTORY_SHAPE), rows, tgt)
                frames += M * S
                stats.row(time.monotonic() - start, frames,
                          ROLE_KEYS[role], loss, float(tgt.mean()))
                for idx in take:
                    buf.release(idx)
                if store is not None:
                    store.publish(merged_params(nets))
                progressed = True
            now = time.monotonic()
            if now - last_ckpt >= config.checkpoint_interval_s:
                path = _checkpoint_name(save_dir, frames)
                save_nets(nets, path)
                save_nets(nets, latest)
                checkpoints.append(path)
                last_ckpt = now
            if not progressed:
                time.sleep(0.002)
    except NonFiniteLoss as e:
        path = os.path.join(save_dir, "model_halt.ckpt")
        save_nets(nets, path)
        stop.set()
        raise TrainHalted(f"training halted: {e}", path) from e
    stop.set()
    path = _checkpoint_name(save_dir, frames)
    save_nets(nets, path)
    save_nets(nets, latest)
    checkpoints.append(path)
    return TrainResult(frames=frames, episodes=-1,
                       elapsed_s=time.monotonic() - start,
                       checkpoint_path=path, stat_path=stats.path,
                       checkpoints=checkpoints)


def _train_sync(config: TrainConfig, nets: dict[Role, QNetwork],
                stats: _StatWriter, save_dir: str) -> TrainResult:
    """Single-process trainer with the same flush/batch bookkeeping."""
    opts = {r: make_optimizer(nets[r], config.lr) for r in Role}
    rng = np.random.default_rng(config.seed + 1)
    pend: dict[Role, list] = {r: [] for r in Role}
    entries: dict[Role, list] = {r: [] for r in Role}
    frames = 0
    episodes = 0
    start = time.monotonic()
    last_ckpt = start
    checkpoints: list[str] = []
    latest = os.path.join(save_dir, "model_latest.ckpt")
    M, S = config.batch_entries, config.entry_size
    try:
        while frames < config.total_frames:
            rec = play_episode(nets, config.epsilon, rng, config.objective)
            episodes += 1
            rets = rec.returns(config.gamma)
            for role in Role:
                stream = pend[role]
                stream.extend(zip(rec.histories[role], rec.states[role],
                                  rec.actions[role], rets[role]))
                while len(stream) >= S:
                    chunk, pend[role] = stream[:S], stream[S:]
                    stream = pend[role]
                    entries[role].append(chunk)
                while len(entries[role]) >= M:
                    take, entries[role] = entries[role][:M], entries[role][M:]
                    flat = [inst for entry in take for inst in entry]
                    hist = np.stack([f[0] for f in flat]).reshape(
                        -1, *HISTORY_SHAPE)
                    rows = np.concatenate(
                        [np.stack([f[1] for f in flat]),
                         np.stack([f[2] for f in flat])], axis=1)
                    tgt = np.array([f[3] for f in flat])
                    loss = train_step_mse(nets[role], opts[role],
                                          hist, rows, tgt)
                    frames += M * S
                    stats.row(time.monotonic() - start, frames,
                              ROLE_KEYS[role], loss, float(tgt.mean()))
            now = time.monotonic()
            if now - last_ckpt >= config.checkpoint_interval_s:
                path = _checkpoint_name(save_dir, frames)
                save_nets(nets, path)
                save_nets(nets, latest)
                checkpoints.append(path)
                last_ckpt = now
    except NonFiniteLoss as e:
        path = os.path.join(save_dir, "model_halt.ckpt")
        save_nets(nets, path)
        raise TrainHalted(f"training halted: {e}", path) from e
    path = _checkpoint_name(save_dir, frames)
    save_nets(nets, path)
    save_nets(nets, latest)
    checkpoints.append(path)
    return TrainResult(frames=frames, episodes=episodes,
                       elapsed_s=time.monotonic() - start,
                       checkpoint_path=path, stat_path=stats.path,
                       checkpoints=checkpoints)


def train_dmc(config: TrainConfig, resume: str | None = None) -> TrainResult:
    config.validate()
    os.makedirs(config.save_dir, exist_ok=True)
    nets = make_nets(config.preset, seed=config.seed)
    if resume is not None:
        load_nets(nets, resume)
    stats = _StatWriter(os.path.join(config.save_dir, "train_stats.csv"))
    try:
        return _train_guarded(config, nets, stats)
    except KeyboardInterrupt:
        # leave a usable checkpoint behind when the run is cut short
        path = os.path.join(config.save_dir, "model_interrupt.ckpt")
        save_nets(nets, path)
        raise
    finally:
        stats.close()


def _train_guarded(config: TrainConfig, nets, stats) -> TrainResult:
    if config.num_actors == 0:
        return _train_sync(config, nets, stats, config.save_dir)
    buffers = {r: SharedBuffer(config.buffer_entries, config.entry_size,
                               state_width(r)) for r in Role}
    store = ParamStore(merged_params(nets))
    stop = mp.Event()
    workers = [mp.Process(target=actor_loop,
                          args=(config, buffers, store, stop, i),
                          daemon=True)
               for i in range(config.num_actors)]
    for w in workers:
        w.start()
    try:
        return learner_loop(config, buffers, nets, store, stop, stats,
                            config.save_dir)
    finally:
        stop.set()
        for w in workers:
            w.join(timeout=5.0)
            if w.is_alive():
                w.terminate()
        for buf in buffers.values():
            buf.close()
        store.close()
