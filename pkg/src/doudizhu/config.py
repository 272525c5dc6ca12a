"""Run configuration: defaults, config file, DDZ_* environment, CLI flags.

Precedence, lowest to highest: built-in defaults, config file, environment
variables, explicit overrides (CLI flags).  Unknown keys are rejected at
every layer.  The file format is plain `key = value` lines with `#`
comments; booleans accept true/false/1/0/yes/no.

Defaults (also visible via `defaults()`):

  objective             wp          training objective, wp or adp
  preset                desk        network size, desk or full
  actors                1           actor processes, 0 = in-process
  total_frames          1000000     learner frames before stopping
  buffer_entries        50          shared-buffer entries per position
  entry_size            100         instances per buffer entry
  batch_entries         32          entries consumed per learner batch
  epsilon               0.01        actor exploration rate
  gamma                 1.0         return discount
  lr                    0.0001      RMSprop learning rate
  sync_every            1           episodes between actor weight pulls
  checkpoint_interval_s 1800.0      seconds between periodic checkpoints
  seed                  0           master seed
  save_dir              runs/dmc    checkpoint + stat output directory
  corpus                (empty)     match-log corpus path
  bid_corpus            (empty)     bid-labeled corpus path (JSON lines)
  epochs                20          passes for the supervised trainers
  batch_instances       8096        instance batch for the move imitator
  max_batches           0           per-position batch budget, 0 = off
  decks                 100         paired decks per evaluation
  workers               1           tournament worker threads
  host                  127.0.0.1   service bind host
  port                  8000        service bind port
  think_delay_ms        300         bot move delay in the service
  checkpoint            (empty)     value-net checkpoint for serve/eval
  bid_checkpoint        (empty)     bid-net checkpoint for serve
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields


class InvalidRunConfig(ValueError):
    pass


ENV_PREFIX = "DDZ_"


@dataclass
class RunConfig:
    objective: str = "wp"
    preset: str = "desk"
    actors: int = 1
    total_frames: int = 1_000_000
    buffer_entries: int = 50
    entry_size: int = 100
    batch_entries: int = 32
    epsilon: float = 0.01
    gamma: float = 1.0
    lr: float = 1e-4
    sync_every: int = 1
    checkpoint_interval_s: float = 1800.0
    seed: int = 0
    save_dir: str = "runs/dmc"
    corpus: str = ""
    bid_corpus: str = ""
    epochs: int = 20
    batch_instances: int = 8096
    max_batches: int = 0
    decks: int = 100
    workers: int = 1
    host: str = "127.0.0.1"
    port: int = 8000
    think_delay_ms: int = 300
    checkpoint: str = ""
    bid_checkpoint: str = ""


_FIELDS = {f.name: f.type for f in fields(RunConfig)}
_TYPES = {f.name: type(getattr(RunConfig(), f.name)) for f in fields(RunConfig)}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def defaults() -> dict:
    cfg = RunConfig()
    return {name: getattr(cfg, name) for name in _FIELDS}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw, 0)
        if kind is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise InvalidRunConfig(
            f"bad value for {key}: {raw!r} (expected {kind.__name__})"
        ) from exc


def parse_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidRunConfig(f"{path}:{lineno}: expected key = value")
            key, raw = line.split("=", 1)
            key = key.strip()
            if key not in _FIELDS:
                raise InvalidRunConfig(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _coerce(key, raw)
    return out


def env_overrides(env=None) -> dict:
    env = os.environ if env is None else env
    out = {}
    for name, raw in env.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key not in _FIELDS:
            raise InvalidRunConfig(f"unknown environment key {name}")
        out[key] = _coerce(key, raw)
    return out


def load_run_config(path: str | None = None, env=None,
                    overrides: dict | None = None) -> RunConfig:
    """Merge defaults, file, environment and explicit overrides in order."""
    merged = defaults()
    if path:
        merged.update(parse_config_file(path))
    merged.update(env_overrides(env))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise InvalidRunConfig(f"unknown config key {key!r}")
        merged[key] = value if not isinstance(value, str) else _coerce(key, value)
    cfg = RunConfig(**merged)
    if cfg.objective not in ("wp", "adp"):
        raise InvalidRunConfig(f"objective must be wp or adp, got {cfg.objective!r}")
    if cfg.preset not in ("desk", "full"):
        raise InvalidRunConfig(f"preset must be desk or full, got {cfg.preset!r}")
    if cfg.actors < 0:
        raise InvalidRunConfig("actors must be >= 0")
    if cfg.port <= 0 or cfg.port > 65535:
        raise InvalidRunConfig(f"port out of range: {cfg.port}")
    if cfg.think_delay_ms < 0:
        raise InvalidRunConfig("think_delay_ms must be >= 0")
    return cfg


__all__ = ["RunConfig", "InvalidRunConfig", "ENV_PREFIX", "defaults",
           "parse_config_file", "env_overrides", "load_run_config"]
