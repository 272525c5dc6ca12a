"""Dense and recurrent layers with explicit backward passes.

Everything is plain numpy. A layer stores its parameters, its gradient
accumulators, and whatever forward cache its backward pass needs. Weights
initialize uniform in +-1/sqrt(fan_in); the LSTM forget-gate bias gets +1
on top so early training does not forget everything immediately.
"""
from __future__ import annotations

import math

import numpy as np


def sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Linear:
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator,
                 dtype=np.float32):
        bound = 1.0 / math.sqrt(n_in)
        self.W = rng.uniform(-bound, bound, (n_in, n_out)).astype(dtype)
        self.b = rng.uniform(-bound, bound, n_out).astype(dtype)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._x = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.W + self.b

    def backward(self, dy: np.ndarray) -> np.ndarray:
        self.dW += self._x.T @ dy
        self.db += dy.sum(axis=0)
        return dy @ self.W.T

    def params(self):
        return {"W": self.W, "b": self.b}

    def grads(self):
        return {"W": self.dW, "b": self.db}


class MLP:
    """Stack of Linear layers with ReLU between them; last layer is linear."""

    def __init__(self, n_in: int, hidden: tuple[int, ...], n_out: int,
                 rng: np.random.Generator, dtype=np.float32):
        sizes = [n_in, *hidden, n_out]
        self.layers = [Linear(sizes[i], sizes[i + 1], rng, dtype)
                       for i in range(len(sizes) - 1)]
        self._masks: list[np.ndarray] = []

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._masks = []
        for i, layer in enumerate(self.layers):
            x = layer.forward(x)
            if i < len(self.layers) - 1:
                mask = x > 0
                x = x * mask
                self._masks.append(mask)
        return x

    def backward(self, dy: np.ndarray) -> np.ndarray:
        for i in range(len(self.layers) - 1, -1, -1):
            if i < len(self.layers) - 1:
                dy = dy * self._masks[i]
            dy = self.layers[i].backward(dy)
        return dy

    def params(self):
        return {f"{i}.{k}": v for i, layer in enumerate(self.layers)
                for k, v in layer.params().items()}

    def grads(self):
        return {f"{i}.{k}": v for i, layer in enumerate(self.layers)
                for k, v in layer.grads().items()}


class LSTM:
    """Single-layer LSTM; forward consumes (batch, steps, n_in) and returns
    the final hidden state. Gate order inside the fused weights: input,
    forget, cell, output."""

    def __init__(self, n_in: int, n_hidden: int, rng: np.random.Generator,
                 dtype=np.float32):
        self.n_hidden = n_hidden
        bx = 1.0 / math.sqrt(n_in)
        bh = 1.0 / math.sqrt(n_hidden)
        self.Wx = rng.uniform(-bx, bx, (n_in, 4 * n_hidden)).astype(dtype)
        self.Wh = rng.uniform(-bh, bh, (n_hidden, 4 * n_hidden)).astype(dtype)
        self.b = rng.uniform(-bh, bh, 4 * n_hidden).astype(dtype)
        self.b[n_hidden:2 * n_hidden] += 1.0
        self.dWx = np.zeros_like(self.Wx)
        self.dWh = np.zeros_like(self.Wh)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def forward(self, x: np.ndarray, cache: bool = True) -> np.ndarray:
        """cache=False skips the backward bookkeeping; inference stays
        free of shared mutable state that way."""
        B, T, _ = x.shape
        H = self.n_hidden
        dtype = self.Wx.dtype
        h = np.zeros((B, H), dtype=dtype)
        c = np.zeros((B, H), dtype=dtype)
        steps = []
        for t in range(T):
            xt = x[:, t, :]
            z = xt @ self.Wx + h @ self.Wh + self.b
            i = sigmoid(z[:, :H])
            f = sigmoid(z[:, H:2 * H])
            g = np.tanh(z[:, 2 * H:3 * H])
            o = sigmoid(z[:, 3 * H:])
            c_new = f * c + i * g
            tc = np.tanh(c_new)
            if cache:
                steps.append((xt, h, c, i, f, g, o, tc))
            h, c = o * tc, c_new
        if cache:
            self._cache = (x.shape, steps)
        return h

    def backward(self, dh: np.ndarray) -> np.ndarray:
        shape, steps = self._cache
        H = self.n_hidden
        dx = np.zeros(shape, dtype=self.Wx.dtype)
        dc = np.zeros_like(dh)
        for t in range(len(steps) - 1, -1, -1):
            xt, h_prev, c_prev, i, f, g, o, tc = steps[t]
            do = dh * tc
            dc = dc + dh * o * (1.0 - tc * tc)
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dz = np.concatenate([
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ], axis=1)
            self.dWx += xt.T @ dz
            self.dWh += h_prev.T @ dz
            self.db += dz.sum(axis=0)
            dx[:, t, :] = dz @ self.Wx.T
            dh = dz @ self.Wh.T
            dc = dc * f
        return dx

    def params(self):
        return {"Wx": self.Wx, "Wh": self.Wh, "b": self.b}

    def grads(self):
        return {"Wx": self.dWx, "Wh": self.dWh, "b": self.db}
