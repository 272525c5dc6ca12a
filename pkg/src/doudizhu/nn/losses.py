"""Losses returning (scalar loss, gradient w.r.t. predictions)."""
from __future__ import annotations

import numpy as np

from .layers import sigmoid


class NonFiniteLoss(RuntimeError):
    """Training produced NaN or Inf; carries diagnostics, never clips."""


def check_finite(loss: float, context: str = "") -> float:
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"non-finite loss {loss!r} {context}".strip())
    return float(loss)


def mse_loss(pred: np.ndarray, target: np.ndarray):
    diff = pred - target
    loss = float(np.mean(diff * diff))
    dpred = (2.0 / diff.size) * diff
    return loss, dpred


def _softplus(x):
    return np.logaddexp(0.0, x)


def weighted_bce_with_logits(logits: np.ndarray, labels: np.ndarray,
                             weights: np.ndarray):
    """Per-instance weighted binary cross entropy on raw logits.

    loss_i = w_i * (softplus(z_i) - y_i * z_i), averaged over the batch.
    """
    per = weights * (_softplus(logits) - labels * logits)
    loss = float(np.mean(per))
    dlogits = weights * (sigmoid(logits) - labels) / logits.size
    return loss, dlogits.astype(logits.dtype)
