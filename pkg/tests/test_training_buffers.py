"""Single-process checks of the shared buffer and parameter store.

The queue-ownership protocol itself (many actors, one learner, nothing
lost) gets a full multi-process soak in the acceptance suite; here we pin
down layout, round trips, and the error paths.
"""
import numpy as np
import pytest

from doudizhu.training.buffers import (HIST_FLAT, BufferClosed, ParamStore,
                                       SharedBuffer)

STATE = 23


@pytest.fixture
def buf():
    b = SharedBuffer(num_entries=4, entry_size=5, state_width=STATE)
    yield b
    b.close()


def fill(rng, n, state_width=STATE):
    hist = rng.normal(size=(n, HIST_FLAT)).astype(np.float32)
    states = rng.normal(size=(n, state_width)).astype(np.float32)
    actions = rng.normal(size=(n, 54)).astype(np.float32)
    targets = rng.normal(size=n).astype(np.float32)
    return hist, states, actions, targets


def test_entry_views_layout(buf):
    hv, sv, av, tv = buf.entry_views(0)
    assert hv.shape == (5, HIST_FLAT)
    assert sv.shape == (5, STATE)
    assert av.shape == (5, 54)
    assert tv.shape == (5,)


def test_write_read_round_trip(buf, rng):
    hist, states, actions, targets = fill(rng, 5)
    idx = buf.acquire_free()
    buf.write_entry(idx, hist, states, actions, targets)
    buf.commit(idx)
    got = buf.pop_full(timeout=1.0)
    assert got == idx
    h, s, a, t = buf.read_entries([got])
    assert (h == hist).all() and (s == states).all()
    assert (a == actions).all() and (t == targets).all()


def test_write_entry_rejects_wrong_count(buf, rng):
    hist, states, actions, targets = fill(rng, 3)
    idx = buf.acquire_free()
    with pytest.raises(ValueError):
        buf.write_entry(idx, hist, states, actions, targets)


def test_read_unwritten_entry_fails(buf):
    with pytest.raises(BufferClosed):
        buf.read_entries([2])


def test_free_pool_exhausts_then_recovers(buf, rng):
    held = [buf.acquire_free() for _ in range(4)]
    assert sorted(held) == [0, 1, 2, 3]
    assert buf.acquire_free(timeout=0.05) is None
    hist, states, actions, targets = fill(rng, 5)
    buf.write_entry(held[0], hist, states, actions, targets)
    buf.commit(held[0])
    idx = buf.pop_full(timeout=1.0)
    buf.read_entries([idx])
    buf.release(idx)
    assert buf.acquire_free(timeout=1.0) == idx


def test_pop_full_empty_returns_none(buf):
    assert buf.pop_full(timeout=0.05) is None


def test_released_entry_is_reset(buf, rng):
    hist, states, actions, targets = fill(rng, 5)
    idx = buf.acquire_free()
    buf.write_entry(idx, hist, states, actions, targets)
    buf.commit(idx)
    got = buf.pop_full(timeout=1.0)
    buf.release(got)
    with pytest.raises(BufferClosed):
        buf.read_entries([got])


def test_every_tagged_instance_seen_exactly_once(buf):
    """Cycle many tagged entries through the queues in one process."""
    rng = np.random.default_rng(1)
    seen = []
    serial = 0
    pending = []
    for _ in range(60):
        idx = buf.acquire_free(timeout=1.0)
        assert idx is not None
        hist, states, actions, _ = fill(rng, 5)
        tags = np.arange(serial, serial + 5, dtype=np.float32)
        serial += 5
        buf.write_entry(idx, hist, states, actions, tags)
        buf.commit(idx)
        pending.append(idx)
        if len(pending) == 2:
            take = [buf.pop_full(timeout=1.0) for _ in pending]
            _, _, _, t = buf.read_entries(take)
            seen.extend(int(x) for x in t)
            for i in take:
                buf.release(i)
            pending = []
    assert sorted(seen) == list(range(serial))


def test_batch_concatenation_order(buf, rng):
    idxs = []
    blocks = []
    for k in range(3):
        idx = buf.acquire_free()
        hist, states, actions, _ = fill(rng, 5)
        tags = np.full(5, float(k), dtype=np.float32)
        buf.write_entry(idx, hist, states, actions, tags)
        buf.commit(idx)
        idxs.append(buf.pop_full(timeout=1.0))
        blocks.append(tags)
    _, _, _, t = buf.read_entries(idxs)
    assert (t == np.concatenate(blocks)).all()
    assert t.shape == (15,)


def test_param_store_round_trip():
    rng = np.random.default_rng(2)
    template = {"a": rng.normal(size=(3, 4)).astype(np.float32),
                "b": rng.normal(size=7).astype(np.float32)}
    store = ParamStore(template)
    try:
        into = {k: np.zeros_like(v) for k, v in template.items()}
        version = store.pull(into, -1)
        assert version == 1
        for k in template:
            assert (into[k] == template[k]).all()
    finally:
        store.close()


def test_param_store_version_gate():
    template = {"w": np.arange(6, dtype=np.float32).reshape(2, 3)}
    store = ParamStore(template)
    try:
        into = {"w": np.zeros((2, 3), dtype=np.float32)}
        version = store.pull(into, -1)
        into["w"][:] = -1.0
        # same version: pull must not copy anything
        assert store.pull(into, version) == version
        assert (into["w"] == -1.0).all()
        store.publish({"w": np.full((2, 3), 9.0, dtype=np.float32)})
        new = store.pull(into, version)
        assert new == version + 1
        assert (into["w"] == 9.0).all()
    finally:
        store.close()
