"""Scanline renderer: one central ray per pixel, nearest hit wins.

Pipeline per pixel: cast the ray, keep the closest segment intersection
(occlusion), sample the segment's albedo at the hit parameter, apply the
monotone contrast map gain * albedo**gamma, add seeded Gaussian noise,
quantize to n_levels.  Pixels with no hit read background 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..kernels import raycast
from .scenes import Image1D, Pose, Scene2D


@dataclass(frozen=True)
class Contrast:
    """gain * albedo**gamma; monotone on [0, 1] for positive parameters."""

    gain: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.gain <= 0 or self.gamma <= 0:
            raise ValueError("gain and gamma must be positive")

    def apply(self, albedo: np.ndarray) -> np.ndarray:
        return self.gain * np.power(albedo, self.gamma)


def _segment_arrays(scene: Scene2D):
    segs = scene.segments()
    geom = np.array(
        [[s.p0[0], s.p0[1], s.p1[0], s.p1[1]] for s in segs], dtype=np.float64
    ).reshape(-1, 4)
    return segs, geom


def render(
    scene: Scene2D,
    pose: Pose,
    contrast: Contrast = Contrast(),
    noise_sigma: float = 0.0,
    rng=None,
    n_levels: int = 256,
) -> Image1D:
    """Render the scene from the pose.

    `rng` may be a numpy Generator or an int seed; it is only consulted
    when noise_sigma > 0, so sigma-zero renders are bit-reproducible with
    no seed at all.
    """
    segs, geom = _segment_arrays(scene)
    angles = pose.ray_angles()
    dxs = np.cos(angles)
    dys = np.sin(angles)
    t, seg_idx, s_par = raycast(pose.x, pose.y, dxs, dys, geom)

    values = np.zeros(pose.pixels, dtype=np.float64)
    hit = seg_idx >= 0
    if hit.any():
        albedo = np.array(
            [
                segs[int(k)].albedo_at(float(sp))
                for k, sp in zip(seg_idx[hit], s_par[hit])
            ]
        )
        values[hit] = contrast.apply(albedo)

    if noise_sigma > 0.0:
        if rng is None:
            raise ValueError("noise requires an rng or seed")
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        values = values + rng.normal(0.0, noise_sigma, size=values.shape)

    levels = np.clip(
        np.rint(values * (n_levels - 1)), 0, n_levels - 1
    ).astype(np.int64)
    return Image1D(levels=levels, prequant=values, n_levels=n_levels)
