"""Per-step return targets from episodic rewards.

The game pays out only at the end, so with gamma=1 every step's return is
just the terminal reward. The general backward recursion
r_t <- r_t + gamma * r_{t+1} is kept for discounted variants.
"""
from __future__ import annotations

import numpy as np


class NonTerminalEpisode(ValueError):
    pass


def discounted_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """Backward accumulation over one seat's reward stream."""
    out = np.asarray(rewards, dtype=np.float64).copy()
    for t in range(out.size - 2, -1, -1):
        out[t] += gamma * out[t + 1]
    return out


def compute_returns(episode, gamma: float) -> dict:
    """Per-position return vectors for a finished episode."""
    if episode.result is None:
        raise NonTerminalEpisode("episode has no result; game did not finish")
    return {pos: discounted_returns(rew, gamma)
            for pos, rew in episode.rewards.items()}
