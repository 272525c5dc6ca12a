"""Checkpoint container: named float32 tensors in one file.

Layout, all little-endian:
  magic   4 bytes  "DZCK"
  version u32      currently 1
  records repeated to end of payload:
    name_len u32, name utf-8, rank u64, dims u64 each, data f32
  crc32   u32 of everything before it
"""
from __future__ import annotations

import struct
import zlib

import numpy as np

MAGIC = b"DZCK"
VERSION = 1


class CheckpointError(Exception):
    pass


class IoError(CheckpointError):
    pass


class VersionMismatch(CheckpointError):
    pass


class ChecksumMismatch(CheckpointError):
    pass


def save_checkpoint(tensors: dict[str, np.ndarray], path) -> None:
    chunks = [MAGIC, struct.pack("<I", VERSION)]
    for name in sorted(tensors):
        arr = np.asarray(tensors[name], dtype="<f4")
        nb = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(nb)))
        chunks.append(nb)
        chunks.append(struct.pack("<Q", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}Q", *arr.shape)
                      if arr.ndim else b"")
        chunks.append(arr.tobytes())
    payload = b"".join(chunks)
    payload += struct.pack("<I", zlib.crc32(payload))
    try:
        with open(path, "wb") as f:
            f.write(payload)
    except OSError as e:
        raise IoError(str(e)) from e


def load_checkpoint(path) -> dict[str, np.ndarray]:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoError(str(e)) from e
    if len(data) < 12 or data[:4] != MAGIC:
        raise VersionMismatch("not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise VersionMismatch(f"unsupported version {version}")
    (crc,) = struct.unpack_from("<I", data, len(data) - 4)
    if zlib.crc32(data[:-4]) != crc:
        raise ChecksumMismatch("checkpoint corrupted (crc mismatch)")
    out: dict[str, np.ndarray] = {}
    off = 8
    end = len(data) - 4
    while off < end:
        try:
            (name_len,) = struct.unpack_from("<I", data, off)
            off += 4
            name = data[off:off + name_len].decode("utf-8")
            off += name_len
            (rank,) = struct.unpack_from("<Q", data, off)
            off += 8
            dims = struct.unpack_from(f"<{rank}Q", data, off)
            off += 8 * rank
            count = int(np.prod(dims)) if rank else 1
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=off)
            off += 4 * count
            out[name] = arr.reshape(dims).copy()
        except (struct.error, ValueError) as e:
            raise ChecksumMismatch(f"truncated record: {e}") from e
    if off != end:
        raise ChecksumMismatch("trailing bytes after last record")
    return out
