"""Flatland scene description: segment chains with piecewise-constant albedo.

The world is 2-D and images are 1-D scanlines; that keeps every phenomenon
of interest (occlusion, viewpoint, contrast, quantization, scaling with
distance) while staying cheap enough for exhaustive oracles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Marker:
    """A distinguishing albedo sub-interval on a segment (params in [0, 1])."""

    t0: float
    t1: float
    albedo: float

    def __post_init__(self):
        if not 0.0 <= self.t0 < self.t1 <= 1.0:
            raise ValueError("marker interval must satisfy 0 <= t0 < t1 <= 1")
        if not 0.0 <= self.albedo <= 1.0:
            raise ValueError("albedo must be in [0, 1]")


@dataclass(frozen=True)
class Segment:
    p0: tuple
    p1: tuple
    albedo: float
    marker: Marker | None = None

    def __post_init__(self):
        if self.p0 == self.p1:
            raise ValueError("degenerate segment")
        if not 0.0 <= self.albedo <= 1.0:
            raise ValueError("albedo must be in [0, 1]")

    def albedo_at(self, s: float) -> float:
        if self.marker is not None and self.marker.t0 <= s <= self.marker.t1:
            return self.marker.albedo
        return self.albedo


@dataclass(frozen=True)
class Scene2D:
    """One or more objects, each a chain of segments; static per episode."""

    objects: tuple

    def __post_init__(self):
        if len(self.objects) < 1:
            raise ValueError("scene needs at least one object")

    def segments(self) -> tuple:
        segs = []
        for chain in self.objects:
            segs.extend(chain)
        return tuple(segs)

    def to_json(self) -> str:
        doc = {"objects": []}
        for chain in self.objects:
            vertices = [list(chain[0].p0)]
            albedo = []
            markers = []
            for i, seg in enumerate(chain):
                vertices.append(list(seg.p1))
                albedo.append(seg.albedo)
                if seg.marker is not None:
                    markers.append(
                        {
                            "segment": i,
                            "t0": seg.marker.t0,
                            "t1": seg.marker.t1,
                            "albedo": seg.marker.albedo,
                        }
                    )
            doc["objects"].append(
                {"vertices": vertices, "albedo": albedo, "markers": markers}
            )
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Scene2D":
        doc = json.loads(text)
        objects = []
        for obj in doc["objects"]:
            verts = [tuple(v) for v in obj["vertices"]]
            markers = {m["segment"]: m for m in obj.get("markers", [])}
            chain = []
            for i, (a, b) in enumerate(zip(verts, verts[1:])):
                m = markers.get(i)
                marker = (
                    Marker(m["t0"], m["t1"], m["albedo"]) if m else None
                )
                chain.append(Segment(a, b, obj["albedo"][i], marker))
            objects.append(tuple(chain))
        return cls(tuple(objects))


def single_segment_scene(p0, p1, albedo, marker=None) -> Scene2D:
    return Scene2D(((Segment(tuple(p0), tuple(p1), albedo, marker),),))


@dataclass(frozen=True)
class Pose:
    """Sensor frame: position, heading, field of view, pixel count."""

    x: float
    y: float
    heading: float
    fov: float = 1.0
    pixels: int = 64

    def __post_init__(self):
        if not 0.0 < self.fov < math.pi:
            raise ValueError("fov must be in (0, pi)")
        if self.pixels < 1:
            raise ValueError("need at least one pixel")

    def ray_angles(self) -> np.ndarray:
        j = np.arange(self.pixels, dtype=np.float64)
        return self.heading - self.fov / 2.0 + (j + 0.5) * self.fov / self.pixels

    def key(self) -> tuple:
        return (self.x, self.y, self.heading, self.fov, self.pixels)

    def to_dict(self):
        return {
            "x": self.x,
            "y": self.y,
            "heading": self.heading,
            "fov": self.fov,
            "pixels": self.pixels,
        }

    @classmethod
    def from_dict(cls, d) -> "Pose":
        return cls(d["x"], d["y"], d["heading"], d["fov"], d["pixels"])


@dataclass
class Image1D:
    """Quantized scanline plus the pre-quantization reals for oracles."""

    levels: np.ndarray      # int64 in 0..L-1
    prequant: np.ndarray    # float64, noiseless-or-noisy values before rounding
    n_levels: int = 256

    def __post_init__(self):
        expect = np.clip(
            np.rint(self.prequant * (self.n_levels - 1)), 0, self.n_levels - 1
        ).astype(np.int64)
        if not np.array_equal(expect, self.levels):
            raise ValueError("levels are not the clamp-round of prequant")
