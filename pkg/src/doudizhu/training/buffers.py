"""Shared-memory data plumbing between actor processes and the learner.

SharedBuffer holds B fixed-size entries for one position. Ownership moves
through two queues: an entry index sits in the free queue (writable by the
actor that pops it) or the full queue (readable by the learner that pops
it), never both. The learner returns consumed indices to the free queue,
so every instance written is read exactly once.

ParamStore is a single shared block of all network parameters plus a
version counter; the learner publishes under a lock and actors pull when
the version moves. Both classes assume fork-style process start so the
children inherit the mappings.
"""
from __future__ import annotations

import multiprocessing as mp
from multiprocessing import shared_memory

import numpy as np

from ..encode import CARD_VEC, HISTORY_SHAPE

HIST_FLAT = HISTORY_SHAPE[0] * HISTORY_SHAPE[1]


class BufferClosed(RuntimeError):
    pass


class SharedBuffer:
    """B entries x S instances of (history, state, action, target)."""

    def __init__(self, num_entries: int, entry_size: int, state_width: int):
        self.num_entries = num_entries
        self.entry_size = entry_size
        self.state_width = state_width
        inst = HIST_FLAT + state_width + CARD_VEC + 1
        self._inst_width = inst
        nbytes = num_entries * entry_size * inst * 4 + num_entries * 8
        self._shm = shared_memory.SharedMemory(create=True, size=nbytes)
        self._data = np.ndarray(
            (num_entries, entry_size, inst), dtype=np.float32,
            buffer=self._shm.buf[:num_entries * entry_size * inst * 4])
        self._counts = np.ndarray(
            (num_entries,), dtype=np.int64,
            buffer=self._shm.buf[num_entries * entry_size * inst * 4:])
        self._counts[:] = 0
        self.free_q: mp.Queue = mp.Queue()
        self.full_q: mp.Queue = mp.Queue()
        for i in range(num_entries):
            self.free_q.put(i)

    # views ------------------------------------------------------------
    def entry_views(self, idx: int):
        row = self._data[idx]
        h0, h1 = 0, HIST_FLAT
        s1 = h1 + self.state_width
        a1 = s1 + CARD_VEC
        return (row[:, h0:h1], row[:, h1:s1], row[:, s1:a1], row[:, a1])

    # actor side -------------------------------------------------------
    def acquire_free(self, timeout: float | None = None):
        try:
            return self.free_q.get(timeout=timeout)
        except Exception:
            return None

    def write_entry(self, idx: int, histories, states, actions, targets) -> None:
        if len(targets) != self.entry_size:
            raise ValueError(
                f"entry must hold exactly {self.entry_size} instances, "
                f"got {len(targets)}")
        hv, sv, av, tv = self.entry_views(idx)
        hv[:] = np.asarray(histories, dtype=np.float32).reshape(
            self.entry_size, HIST_FLAT)
        sv[:] = states
        av[:] = actions
        tv[:] = targets
        self._counts[idx] = self.entry_size

    def commit(self, idx: int) -> None:
        self.full_q.put(idx)

    # learner side -----------------------------------------------------
    def pop_full(self, timeout: float | None = None):
        try:
            return self.full_q.get(timeout=timeout)
        except Exception:
            return None

    def read_entries(self, indices):
        """Concatenated copies of the given entries, oldest first."""
        hs, ss, as_, ts = [], [], [], []
        for idx in indices:
            if self._counts[idx] != self.entry_size:
                raise BufferClosed(
                    f"entry {idx} holds {self._counts[idx]} instances, "
                    f"want {self.entry_size}")
            hv, sv, av, tv = self.entry_views(idx)
            hs.append(hv.copy())
            ss.append(sv.copy())
            as_.append(av.copy())
            ts.append(tv.copy())
        return (np.concatenate(hs), np.concatenate(ss),
                np.concatenate(as_), np.concatenate(ts))

    def release(self, idx: int) -> None:
        self._counts[idx] = 0
        self.free_q.put(idx)

    def close(self) -> None:
        try:
            self._shm.close()
            self._shm.unlink()
        except FileNotFoundError:
            pass


class ParamStore:
    """Versioned parameter snapshot shared across processes."""

    def __init__(self, template: dict[str, np.ndarray]):
        self._layout = []
        offset = 0
        for name in sorted(template):
            arr = template[name]
            self._layout.append((name, offset, arr.shape, arr.size))
            offset += arr.size
        self._total = offset
        self._shm = shared_memory.SharedMemory(create=True, size=offset * 4)
        self._flat = np.ndarray((offset,), dtype=np.float32,
                                buffer=self._shm.buf)
        self.version = mp.Value("q", 0)
        self.lock = mp.Lock()
        self.publish(template)

    def publish(self, params: dict[str, np.ndarray]) -> None:
        with self.lock:
            for name, off, shape, size in self._layout:
                self._flat[off:off + size] = params[name].ravel()
            self.version.value += 1

    def pull(self, into: dict[str, np.ndarray], last_seen: int) -> int:
        """Copy the snapshot into `into` if it moved; returns the version."""
        with self.version.get_lock():
            current = self.version.value
        if current == last_seen:
            return last_seen
        with self.lock:
            current = self.version.value
            for name, off, shape, size in self._layout:
                into[name][...] = self._flat[off:off + size].reshape(shape)
        return current

    def close(self) -> None:
        try:
            self._shm.close()
            self._shm.unlink()
        except FileNotFoundError:
            pass
