"""Value and bid networks plus their single-step training routines.

The Q network reads the move history through an LSTM, concatenates the
final hidden state with the flat state and action vectors, and pushes that
through an MLP to one scalar: the estimated return of taking the action.
Each position trains its own parameter set.
"""
from __future__ import annotations

import numpy as np

from .layers import LSTM, MLP, sigmoid
from .losses import check_finite, mse_loss, weighted_bce_with_logits
from .optim import RMSprop

HISTORY_STEP = 162
HISTORY_LEN = 5
ACTION_WIDTH = 54

FULL_PRESET = {"lstm_hidden": 128, "mlp_hidden": (512,) * 6}
DESK_PRESET = {"lstm_hidden": 64, "mlp_hidden": (128,) * 4}
PRESETS = {"full": FULL_PRESET, "desk": DESK_PRESET}


class ShapeMismatch(ValueError):
    pass


class QNetwork:
    def __init__(self, state_width: int, lstm_hidden: int = 128,
                 mlp_hidden: tuple[int, ...] = (512,) * 6,
                 seed: int = 0, dtype=np.float32):
        rng = np.random.default_rng(seed)
        self.state_width = state_width
        self.lstm_hidden = lstm_hidden
        self.mlp_hidden = tuple(mlp_hidden)
        self.dtype = dtype
        self.lstm = LSTM(HISTORY_STEP, lstm_hidden, rng, dtype)
        self.mlp = MLP(lstm_hidden + state_width + ACTION_WIDTH,
                       self.mlp_hidden, 1, rng, dtype)

    def forward(self, history: np.ndarray, rows: np.ndarray) -> np.ndarray:
        """history (B, 5, 162); rows (B, state+action). Returns (B,)."""
        if history.shape[1:] != (HISTORY_LEN, HISTORY_STEP):
            raise ShapeMismatch(f"history shape {history.shape}")
        if rows.shape[1] != self.state_width + ACTION_WIDTH:
            raise ShapeMismatch(f"row width {rows.shape[1]}")
        h = self.lstm.forward(history.astype(self.dtype, copy=False))
        x = np.concatenate([h, rows.astype(self.dtype, copy=False)], axis=1)
        return self.mlp.forward(x)[:, 0]

    def backward(self, dout: np.ndarray) -> None:
        dx = self.mlp.backward(dout[:, None])
        self.lstm.backward(dx[:, :self.lstm_hidden])

    def evaluate_actions(self, history: np.ndarray, state_vec: np.ndarray,
                         action_vecs: np.ndarray) -> np.ndarray:
        """Score many candidate actions for one state; LSTM runs once.

        Inference only (no backward cache). The state half of the first
        layer is shared across candidates, so it multiplies through once.
        """
        if action_vecs.ndim != 2 or action_vecs.shape[1] != ACTION_WIDTH:
            raise ShapeMismatch(f"action block {action_vecs.shape}")
        h = self.lstm.forward(
            history.reshape(1, HISTORY_LEN, HISTORY_STEP).astype(self.dtype),
            cache=False)
        left = np.concatenate([h[0], state_vec]).astype(self.dtype)
        first = self.mlp.layers[0]
        shared = left @ first.W[:left.size] + first.b
        x = action_vecs.astype(self.dtype, copy=False) @ first.W[left.size:]
        x += shared
        for layer in self.mlp.layers[1:]:
            np.maximum(x, 0.0, out=x)
            x = x @ layer.W + layer.b
        return x[:, 0]

    def forward_q(self, history: np.ndarray, state_vec: np.ndarray,
                  action_vecs: np.ndarray) -> np.ndarray:
        """Score actions at one decision point; accepts (54,) or (N, 54).

        Same code path as evaluate_actions, so anything logged from the
        policy can be checked against this without float drift.
        """
        if action_vecs.ndim == 1:
            return self.evaluate_actions(history, state_vec,
                                         action_vecs[None])
        return self.evaluate_actions(history, state_vec, action_vecs)

    def params(self) -> dict[str, np.ndarray]:
        out = {f"lstm.{k}": v for k, v in self.lstm.params().items()}
        out.update({f"mlp.{k}": v for k, v in self.mlp.params().items()})
        return out

    def grads(self) -> dict[str, np.ndarray]:
        out = {f"lstm.{k}": v for k, v in self.lstm.grads().items()}
        out.update({f"mlp.{k}": v for k, v in self.mlp.grads().items()})
        return out

    def zero_grad(self) -> None:
        for g in self.grads().values():
            g[...] = 0.0

    def snapshot(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params().items()}

    def load_snapshot(self, snap: dict[str, np.ndarray]) -> None:
        own = self.params()
        if set(own) != set(snap):
            raise ShapeMismatch("parameter names do not match")
        for k, v in own.items():
            v[...] = snap[k]


class BidNetwork:
    """MLP (512, 256, 128, 64, 32, 16) -> scalar, logistic output."""

    WIDTHS = (512, 256, 128, 64, 32, 16)

    def __init__(self, n_in: int = 128, seed: int = 0, dtype=np.float32):
        rng = np.random.default_rng(seed)
        self.n_in = n_in
        self.dtype = dtype
        self.mlp = MLP(n_in, self.WIDTHS, 1, rng, dtype)

    def logits(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.n_in:
            raise ShapeMismatch(f"bid input width {x.shape[1]}")
        return self.mlp.forward(x.astype(self.dtype, copy=False))[:, 0]

    def forward(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.logits(x))

    def backward(self, dlogits: np.ndarray) -> None:
        self.mlp.backward(dlogits[:, None])

    def params(self):
        return {f"mlp.{k}": v for k, v in self.mlp.params().items()}

    def grads(self):
        return {f"mlp.{k}": v for k, v in self.mlp.grads().items()}

    def zero_grad(self):
        for g in self.grads().values():
            g[...] = 0.0

    def snapshot(self):
        return {k: v.copy() for k, v in self.params().items()}

    def load_snapshot(self, snap):
        own = self.params()
        if set(own) != set(snap):
            raise ShapeMismatch("parameter names do not match")
        for k, v in own.items():
            v[...] = snap[k]


def make_optimizer(net, lr: float = 1e-4) -> RMSprop:
    return RMSprop(net.params(), lr=lr)


def train_step_mse(net: QNetwork, opt: RMSprop, history: np.ndarray,
                   rows: np.ndarray, targets: np.ndarray) -> float:
    pred = net.forward(history, rows)
    loss, dpred = mse_loss(pred, targets.astype(pred.dtype, copy=False))
    check_finite(loss, "(mse step)")
    net.zero_grad()
    net.backward(dpred)
    opt.step(net.params(), net.grads())
    return loss


def train_step_weighted_bce(net, opt, x: np.ndarray, labels: np.ndarray,
                            weights: np.ndarray) -> float:
    z = net.logits(x) if isinstance(net, BidNetwork) else net.forward(*x)
    loss, dz = weighted_bce_with_logits(
        z, labels.astype(z.dtype, copy=False),
        weights.astype(z.dtype, copy=False))
    check_finite(loss, "(bce step)")
    net.zero_grad()
    net.backward(dz)
    opt.step(net.params(), net.grads())
    return loss
