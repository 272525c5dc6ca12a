"""Finite-difference gradient verification.

Runs the supplied loss closure once with backprop, then perturbs a random
subset of parameter coordinates (covering every tensor, so LSTM gate
weights are always included) and compares analytic slopes with central
differences. Use double precision networks or the comparison is meaningless.
"""
from __future__ import annotations

import numpy as np


def gradient_check(net, loss_and_grad, loss_only, num_coords: int = 200,
                   step: float = 1e-5, seed: int = 0) -> float:
    """Max relative error between analytic and numeric gradients.

    loss_and_grad(): zero grads, forward + backward, return loss.
    loss_only(): forward pass only, return loss.
    """
    rng = np.random.default_rng(seed)
    loss_and_grad()
    params = net.params()
    grads = {k: v.copy() for k, v in net.grads().items()}
    names = sorted(params)
    per_tensor = max(1, -(-num_coords // len(names)))
    worst = 0.0
    for name in names:
        p = params[name]
        flat = p.reshape(-1)
        gflat = grads[name].reshape(-1)
        idx = rng.choice(flat.size, size=min(per_tensor, flat.size),
                         replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + step
            up = loss_only()
            flat[i] = orig - step
            down = loss_only()
            flat[i] = orig
            numeric = (up - down) / (2.0 * step)
            analytic = gflat[i]
            denom = max(abs(numeric), abs(analytic), 1e-10)
            worst = max(worst, abs(numeric - analytic) / denom)
    return worst
