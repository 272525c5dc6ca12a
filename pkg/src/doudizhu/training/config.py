"""Knobs for the self-play value trainer."""
from __future__ import annotations

import os
from dataclasses import dataclass, field


class InvalidConfig(ValueError):
    pass


def _default_actors() -> int:
    return max(1, (os.cpu_count() or 2) - 1)


@dataclass
class TrainConfig:
    """Buffer sizes follow the reference setup: 50 entries of 100 instances
    per position, batches of 32 entries, epsilon 0.01, discount 1."""

    objective: str = "wp"               # "wp" or "adp"
    preset: str = "desk"                # q-network size preset
    buffer_entries: int = 50            # B
    entry_size: int = 100               # S
    batch_entries: int = 32             # M
    epsilon: float = 0.01
    gamma: float = 1.0
    lr: float = 1e-4
    num_actors: int = field(default_factory=_default_actors)
    sync_every: int = 1                 # episodes between actor param syncs
    total_frames: int = 1_000_000       # learner-consumed instances
    checkpoint_interval_s: float = 1800.0
    seed: int = 0
    save_dir: str = "runs/dmc"

    def validate(self) -> "TrainConfig":
        if self.objective not in ("wp", "adp"):
            raise InvalidConfig(f"objective must be wp or adp, got {self.objective!r}")
        if not (self.buffer_entries >= self.batch_entries >= 1):
            raise InvalidConfig(
                f"need B >= M >= 1, got B={self.buffer_entries} M={self.batch_entries}")
        if self.entry_size < 1:
            raise InvalidConfig(f"entry size must be >= 1, got {self.entry_size}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise InvalidConfig(f"epsilon out of [0,1]: {self.epsilon}")
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidConfig(f"gamma out of [0,1]: {self.gamma}")
        if self.num_actors < 0:
            raise InvalidConfig("num_actors must be >= 0 (0 = in-process)")
        if self.sync_every < 1:
            raise InvalidConfig("sync_every must be >= 1")
        if self.lr <= 0:
            raise InvalidConfig("lr must be positive")
        return self
