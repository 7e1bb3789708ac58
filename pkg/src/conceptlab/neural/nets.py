"""Scalar-input feed-forward ReLU networks.

Weights are plain float64 arrays; the last layer is always identity and
emits a single logit.  Thresholding the logit at 0 (sigmoid at 0.5) gives
the binary class; class 1 is read as "even" in the parity experiments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("relu", "identity")


@dataclass
class Layer:
    w: np.ndarray          # (out, in)
    b: np.ndarray          # (out,)
    activation: str = "relu"

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[0],):
            raise ValueError("layer shape mismatch")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


class FeedForwardNet:
    """A chain of affine layers with relu/identity activations."""

    def __init__(self, layers: list[Layer]):
        if not layers:
            raise ValueError("need at least one layer")
        if layers[0].w.shape[1] != 1:
            raise ValueError("input dimension must be 1")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.w.shape[1] != prev.w.shape[0]:
                raise ValueError("layer dimensions do not chain")
        if layers[-1].w.shape[0] != 1:
            raise ValueError("output dimension must be 1")
        if layers[-1].activation != "identity":
            raise ValueError("last layer activation must be identity")
        self.layers = layers

    def forward(self, x) -> np.ndarray:
        """Logit for each input; accepts a scalar or a 1-D array."""
        a = np.atleast_1d(np.asarray(x, dtype=np.float64)).reshape(-1, 1)
        for layer in self.layers:
            a = a @ layer.w.T + layer.b
            if layer.activation == "relu":
                a = np.maximum(a, 0.0)
        return a[:, 0]

    def __call__(self, x):
        return self.forward(x)

    def classify(self, x) -> np.ndarray:
        """1 where sigmoid(logit) >= 0.5, i.e. logit >= 0."""
        return (self.forward(x) >= 0.0).astype(np.uint8)

    def widths(self) -> list[int]:
        return [self.layers[0].w.shape[1]] + [l.w.shape[0] for l in self.layers]

    def copy(self) -> "FeedForwardNet":
        return FeedForwardNet(
            [Layer(l.w.copy(), l.b.copy(), l.activation) for l in self.layers]
        )

    def flat_weights(self) -> np.ndarray:
        """All parameters, row-major, layer by layer (weights then bias)."""
        parts = []
        for l in self.layers:
            parts.append(l.w.ravel())
            parts.append(l.b.ravel())
        return np.concatenate(parts)

    def with_input_scale(self, scale: float) -> "FeedForwardNet":
        """Fold a fixed input rescaling into the first layer.

        The returned net satisfies new(x) == old(scale * x) exactly when
        scale is a power of two.
        """
        out = self.copy()
        out.layers[0].w = out.layers[0].w * scale
        return out

    # -- serialization: layer shapes + row-major weights, 17 significant digits

    def to_json(self) -> str:
        doc = {
            "layers": [
                {
                    "shape": list(l.w.shape),
                    "w": [float(f"{v:.17g}") for v in l.w.ravel()],
                    "b": [float(f"{v:.17g}") for v in l.b.ravel()],
                    "activation": l.activation,
                }
                for l in self.layers
            ]
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FeedForwardNet":
        doc = json.loads(text)
        layers = []
        for spec in doc["layers"]:
            shape = tuple(spec["shape"])
            w = np.array(spec["w"], dtype=np.float64).reshape(shape)
            b = np.array(spec["b"], dtype=np.float64)
            layers.append(Layer(w, b, spec["activation"]))
        return cls(layers)


def random_net(widths, seed, scale=1.0) -> FeedForwardNet:
    """Gaussian-init net; used for the exact-analysis test fleets."""
    rng = np.random.default_rng(seed)
    layers = []
    dims = list(widths)
    for i, (din, dout) in enumerate(zip(dims, dims[1:])):
        w = rng.normal(0.0, scale / np.sqrt(din), size=(dout, din))
        b = rng.normal(0.0, 0.5, size=dout)
        act = "identity" if i == len(dims) - 2 else "relu"
        layers.append(Layer(w, b, act))
    return FeedForwardNet(layers)


def constant_net(value: float) -> FeedForwardNet:
    """A net whose logit is sigmoid^{-1}(value); handy trivial classifier."""
    if not 0.0 < value < 1.0:
        raise ValueError("value must be in (0, 1)")
    logit = float(np.log(value / (1.0 - value)))
    return FeedForwardNet(
        [
            Layer(np.zeros((1, 1)), np.zeros(1), "relu"),
            Layer(np.zeros((1, 1)), np.array([logit]), "identity"),
        ]
    )


def local_basis_net(
    seed: int, n_hat: int = 256, n_global: int = 16
) -> FeedForwardNet:
    """Three-layer net whose hidden features are global ramps plus unit hats.

    Layer 1 is a bank of equal-slope ramps on a dense kink grid over [0, 1]
    plus a few random moderate-slope global ramps; layer 2 takes banded
    (1, -2, 1) differences of the bank, which makes unit-height hat bumps
    with disjoint transition regions, and passes the global ramps through.
    The output layer starts at zero.  Training moves all layers, but the
    fit is carried by the output layer over a near-orthogonal basis, which
    is what makes the alternating-label fits below tractable for a
    first-order optimizer.
    """
    rng = np.random.default_rng(seed)
    n_grid = 2 * n_hat
    delta = 1.0 / n_grid
    s1 = np.sqrt(n_grid)  # split the needed 1/delta gain across two layers
    bank_kinks = np.arange(-1, n_grid + 2) * delta
    n_bank = bank_kinks.size

    glob_kinks = rng.random(n_global)
    glob_slopes = rng.choice([-1.0, 1.0], n_global) * (
        0.5 + 1.5 * rng.random(n_global)
    )

    w1 = np.concatenate([glob_slopes, np.full(n_bank, s1)]).reshape(-1, 1)
    b1 = -w1[:, 0] * np.concatenate([glob_kinks, bank_kinks])

    m1 = w1.shape[0]
    m2 = n_global + n_hat
    w2 = np.zeros((m2, m1))
    for i in range(n_global):
        w2[i, i] = 1.0
    hat_scale = 1.0 / (s1 * delta)
    for i in range(n_hat):
        center = n_global + (2 * i + 1)
        w2[n_global + i, center - 1] += hat_scale
        w2[n_global + i, center] += -2.0 * hat_scale
        w2[n_global + i, center + 1] += hat_scale

    return FeedForwardNet(
        [
            Layer(w1, b1, "relu"),
            Layer(w2, np.zeros(m2), "relu"),
            Layer(np.zeros((1, m2)), np.zeros(1), "identity"),
        ]
    )
