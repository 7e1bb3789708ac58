"""Minibatch SGD with momentum on the binary cross-entropy of a logit net.

The per-epoch ledger tracks train loss L (nats), stored-information proxy
C (bits), temperature T, and the combined objective F = L + T * C * ln 2
(nats), plus held-out error when a holdout set is given.  F is bookkeeping,
not the optimized quantity: the optimizer follows the loss, the ledger
shows what that did to the complexity of the solution.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .complexity import (
    DEFAULT_PRIOR_SCALE,
    DEFAULT_RESOLUTION,
    complexity_bits,
)
from .nets import FeedForwardNet


class TrainingDivergedError(Exception):
    def __init__(self, epoch: int):
        super().__init__(f"loss became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 0            # 0 = full batch
    epochs: int = 1000
    temperature: float = 1e-4
    seed: int = 0
    momentum: float = 0.9
    grad_clip: float = 0.0         # 0 = off; else global L2 clip
    layer_lr_scale: tuple = ()     # per-layer multipliers; empty = all 1.0
    resolution: float = DEFAULT_RESOLUTION
    prior_scale: float = DEFAULT_PRIOR_SCALE
    stop_at_accuracy: float = 0.0  # 0 = never stop early
    ledger_every: int = 1


LEDGER_COLUMNS = (
    "epoch",
    "loss_nats",
    "complexity_bits",
    "temperature",
    "free_energy_nats",
    "holdout_err",
)


@dataclass
class TrainLedger:
    rows: list[tuple] = field(default_factory=list)

    def append(self, epoch, loss, bits, temperature, holdout_err):
        free_energy = loss + temperature * bits * math.log(2.0)
        self.rows.append(
            (epoch, loss, bits, temperature, free_energy, holdout_err)
        )

    def column(self, name: str) -> np.ndarray:
        i = LEDGER_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(LEDGER_COLUMNS) + "\n")
        for r in self.rows:
            buf.write(
                f"{int(r[0])},{r[1]:.17g},{r[2]:.17g},{r[3]:.17g},"
                f"{r[4]:.17g},{r[5]:.17g}\n"
            )
        return buf.getvalue()


def bce_loss_nats(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-likelihood of the labels under sigmoid(logit)."""
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.mean(np.logaddexp(0.0, logits) - labels * logits))


def _forward_full(net, x):
    # overflow on a diverging run is expected and caught by the loss check
    with np.errstate(over="ignore", invalid="ignore"):
        pres = []
        a = x
        for layer in net.layers:
            pre = a @ layer.w.T + layer.b
            pres.append(pre)
            a = np.maximum(pre, 0.0) if layer.activation == "relu" else pre
        return pres, a[:, 0]


def train_sgd(
    net: FeedForwardNet,
    xs: np.ndarray,
    ys: np.ndarray,
    config: TrainConfig,
    holdout: tuple | None = None,
):
    """Train a copy of `net`; returns (trained_net, ledger).

    Deterministic given config.seed: the only randomness is the per-epoch
    minibatch shuffle.  Raises TrainingDivergedError if the loss leaves the
    reals.
    """
    if len(xs) == 0:
        raise ValueError("training data must be nonempty")
    xs = np.asarray(xs, dtype=np.float64).reshape(-1, 1)
    ys = np.asarray(ys, dtype=np.float64).ravel()
    net0 = net
    net = net.copy()
    rng = np.random.default_rng(config.seed)
    n = xs.shape[0]
    batch = config.batch_size if config.batch_size > 0 else n
    L = len(net.layers)
    scales = config.layer_lr_scale or tuple(1.0 for _ in range(L))
    if len(scales) != L:
        raise ValueError("layer_lr_scale length must match layer count")
    vel_w = [np.zeros_like(l.w) for l in net.layers]
    vel_b = [np.zeros_like(l.b) for l in net.layers]
    ledger = TrainLedger()

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n) if batch < n else np.arange(n)
        for lo in range(0, n, batch):
            idx = order[lo:lo + batch]
            xb = xs[idx]
            yb = ys[idx]
            pres, z = _forward_full(net, xb)
            p = 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))
            delta = ((p - yb) / xb.shape[0])[:, None]  # d loss / d logit
            grads_w = [None] * L
            grads_b = [None] * L
            for li in range(L - 1, -1, -1):
                layer = net.layers[li]
                if layer.activation == "relu":
                    delta = delta * (pres[li] > 0.0)
                inp = (
                    xb
                    if li == 0
                    else np.maximum(pres[li - 1], 0.0)
                    if net.layers[li - 1].activation == "relu"
                    else pres[li - 1]
                )
                grads_w[li] = delta.T @ inp
                grads_b[li] = delta.sum(axis=0)
                if li > 0:
                    delta = delta @ layer.w
            # per-layer scales apply first; the clip bounds the realized step
            grads_w = [g * s for g, s in zip(grads_w, scales)]
            grads_b = [g * s for g, s in zip(grads_b, scales)]
            if config.grad_clip > 0.0:
                norm = math.sqrt(
                    sum(float((g * g).sum()) for g in grads_w)
                    + sum(float((g * g).sum()) for g in grads_b)
                )
                if norm > config.grad_clip:
                    f = config.grad_clip / norm
                    grads_w = [g * f for g in grads_w]
                    grads_b = [g * f for g in grads_b]
            for li in range(L):
                vel_w[li] = config.momentum * vel_w[li] - config.learning_rate * grads_w[li]
                vel_b[li] = config.momentum * vel_b[li] - config.learning_rate * grads_b[li]
                net.layers[li].w += vel_w[li]
                net.layers[li].b += vel_b[li]

        _, z_all = _forward_full(net, xs)
        loss = bce_loss_nats(z_all, ys)
        if not math.isfinite(loss):
            raise TrainingDivergedError(epoch)
        acc = float(np.mean((z_all >= 0.0) == (ys == 1.0)))
        stop = config.stop_at_accuracy > 0.0 and acc >= config.stop_at_accuracy
        if epoch % config.ledger_every == 0 or epoch == config.epochs or stop:
            bits = complexity_bits(
                net0, net, config.resolution, config.prior_scale
            )
            if holdout is not None:
                hx, hy = holdout
                herr = float(
                    np.mean(net.classify(hx) != np.asarray(hy, dtype=np.uint8))
                )
            else:
                herr = float("nan")
            ledger.append(epoch, loss, bits, config.temperature, herr)
        if stop:
            break

    return net, ledger


def accuracy(net, xs, ys) -> float:
    return float(
        np.mean(net.classify(np.asarray(xs, dtype=np.float64))
                == np.asarray(ys, dtype=np.uint8))
    )
