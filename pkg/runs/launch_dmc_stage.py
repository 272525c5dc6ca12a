"""Staged self-play run: exploration annealed across resume stages."""
import os, sys
import faulthandler
faulthandler.enable()
from doudizhu.training import TrainConfig, train_dmc

stage = sys.argv[1]
plans = {
    "1": dict(epsilon=0.25, total_frames=2_000_000, resume=None),
    "2": dict(epsilon=0.10, total_frames=4_000_000,
              resume="runs/dmc_wp/stage1/model_latest.ckpt"),
    "3": dict(epsilon=0.02, total_frames=4_000_000,
              resume="runs/dmc_wp/stage2/model_latest.ckpt"),
}
plan = plans[stage]
cfg = TrainConfig(
    objective="wp",
    preset="desk",
    num_actors=0,
    epsilon=plan["epsilon"],
    total_frames=plan["total_frames"],
    checkpoint_interval_s=600.0,
    seed=int(stage),
    save_dir=f"runs/dmc_wp/stage{stage}",
)
res = train_dmc(cfg, resume=plan["resume"])
print("DONE", res.frames, res.episodes, f"{res.elapsed_s:.1f}s",
      res.checkpoint_path, flush=True)
