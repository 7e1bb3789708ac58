"""Additive acoustic model: bandlimited harmonic sources, gain, time warp.

Sources combine by plain summation, which is the structural difference from
the visual model's nearest-hit selection.  The mixer sums sources in index
order (then any actively emitted source last) so results are bit-exact
reproducible, and a sensor-side Gaussian noise term is added from a seeded
generator.  Consequently mixing sources (S0,) while emitting u equals
mixing (S0, u) while emitting nothing, sample for sample, for every seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class BandwidthError(ValueError):
    """A source's top harmonic (after time warp) reaches the Nyquist rate."""


@dataclass(frozen=True)
class FourierSource:
    """Finite harmonic series: sum_m amp[m] * sin(2 pi (m+1) f0 t + phase[m])."""

    fundamental_hz: float
    amplitudes: tuple
    phases: tuple

    def __post_init__(self):
        if self.fundamental_hz <= 0:
            raise ValueError("fundamental must be positive")
        if len(self.amplitudes) != len(self.phases) or not self.amplitudes:
            raise ValueError("need matching nonempty amplitude/phase tables")

    @property
    def bandwidth_hz(self) -> float:
        return self.fundamental_hz * len(self.amplitudes)

    def value(self, t: np.ndarray) -> np.ndarray:
        out = np.zeros_like(t)
        for m, (a, ph) in enumerate(zip(self.amplitudes, self.phases), start=1):
            out = out + a * np.sin(
                2.0 * np.pi * m * self.fundamental_hz * t + ph
            )
        return out

    def to_dict(self):
        return {
            "fundamental_hz": self.fundamental_hz,
            "amplitudes": list(self.amplitudes),
            "phases": list(self.phases),
        }

    @classmethod
    def from_dict(cls, d) -> "FourierSource":
        return cls(
            d["fundamental_hz"], tuple(d["amplitudes"]), tuple(d["phases"])
        )


@dataclass(frozen=True)
class AudioScene:
    sources: tuple                 # FourierSource, summed in index order
    gain: float = 1.0
    warp_a: float = 1.0            # time warp t -> a*t + b
    warp_b: float = 0.0
    sample_rate: float = 8000.0
    window: int = 256
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("gain must be positive")
        if self.warp_a <= 0:
            raise ValueError("time warp slope must be positive")
        if self.sample_rate <= 0 or self.window < 1:
            raise ValueError("bad sampling parameters")
        for src in self.sources:
            self._check_bandwidth(src)

    def _check_bandwidth(self, src: FourierSource):
        if src.bandwidth_hz * self.warp_a >= self.sample_rate / 2.0:
            raise BandwidthError(
                f"source bandwidth {src.bandwidth_hz * self.warp_a:.1f} Hz "
                f"reaches Nyquist ({self.sample_rate / 2.0:.1f} Hz)"
            )

    def with_extra_source(self, src: FourierSource) -> "AudioScene":
        return AudioScene(
            self.sources + (src,),
            self.gain,
            self.warp_a,
            self.warp_b,
            self.sample_rate,
            self.window,
            self.noise_sigma,
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "sources": [s.to_dict() for s in self.sources],
                "gain": self.gain,
                "warp_a": self.warp_a,
                "warp_b": self.warp_b,
                "sample_rate": self.sample_rate,
                "window": self.window,
                "noise_sigma": self.noise_sigma,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "AudioScene":
        d = json.loads(text)
        return cls(
            tuple(FourierSource.from_dict(s) for s in d["sources"]),
            d["gain"],
            d["warp_a"],
            d["warp_b"],
            d["sample_rate"],
            d["window"],
            d["noise_sigma"],
        )


def mix(
    scene: AudioScene,
    active_source: FourierSource | None = None,
    rng=None,
) -> np.ndarray:
    """Sampled sensor signal for the scene (plus an actively emitted source).

    x[i] = gain * sum_k S_k(a * i/fs + b) [+ active term] + noise_i.
    Summation order is fixed (sources by index, active last).
    """
    if active_source is not None:
        scene._check_bandwidth(active_source)
    t = np.arange(scene.window, dtype=np.float64) / scene.sample_rate
    tw = scene.warp_a * t + scene.warp_b
    acc = np.zeros(scene.window, dtype=np.float64)
    for src in scene.sources:
        acc = acc + src.value(tw)
    if active_source is not None:
        acc = acc + active_source.value(tw)
    out = scene.gain * acc
    if scene.noise_sigma > 0.0:
        if rng is None:
            raise ValueError("noise requires an rng or seed")
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        out = out + rng.normal(0.0, scene.noise_sigma, size=out.shape)
    return out
