import faulthandler, sys
faulthandler.enable()
from doudizhu.training import TrainConfig, train_dmc

cfg = TrainConfig(
    objective="wp",
    preset="desk",
    num_actors=0,
    total_frames=10_000_000,
    checkpoint_interval_s=900.0,
    seed=0,
    save_dir="runs/dmc_wp",
)
res = train_dmc(cfg)
print("DONE", res.frames, res.episodes, f"{res.elapsed_s:.1f}s", res.checkpoint_path)
