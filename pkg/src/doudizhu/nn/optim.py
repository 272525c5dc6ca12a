"""RMSprop with the training defaults used throughout: lr 1e-4,
smoothing 0.99, epsilon 1e-5 added outside the square root."""
from __future__ import annotations

import numpy as np


class RMSprop:
    def __init__(self, params: dict[str, np.ndarray], lr: float = 1e-4,
                 alpha: float = 0.99, eps: float = 1e-5):
        self.lr = lr
        self.alpha = alpha
        self.eps = eps
        self.square_avg = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray],
             grads: dict[str, np.ndarray]) -> None:
        for k, p in params.items():
            g = grads[k]
            s = self.square_avg[k]
            s *= self.alpha
            s += (1.0 - self.alpha) * g * g
            p -= self.lr * g / (np.sqrt(s) + self.eps)
