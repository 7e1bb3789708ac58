"""Exact piecewise-linear analysis of scalar ReLU networks.

A scalar-input ReLU network computes a continuous piecewise-linear map.
This module extracts that map exactly (up to float64 arithmetic), reads the
decision set {x : logit >= 0} off it as a finite union of intervals, and
constructively falsifies any parity claim: past the last breakpoint and the
last level crossing, the predicted class is constant, so one of any two
consecutive integers out there is misclassified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ComplexityCapError(Exception):
    """Piece count blew past the configured cap during analysis."""


@dataclass
class PwlFunction:
    """y = slopes[i] * x + intercepts[i] on the i-th segment.

    Segment i covers (breakpoints[i-1], breakpoints[i]) with infinite end
    segments; there is one more segment than breakpoints.  Adjacent segments
    agree at their shared breakpoint to 1e-9 relative.
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray

    def __post_init__(self):
        self.breakpoints = np.asarray(self.breakpoints, dtype=np.float64)
        self.slopes = np.asarray(self.slopes, dtype=np.float64)
        self.intercepts = np.asarray(self.intercepts, dtype=np.float64)
        if self.slopes.shape[0] != self.breakpoints.shape[0] + 1:
            raise ValueError("need one more segment than breakpoints")
        if self.breakpoints.size and np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        for i, b in enumerate(self.breakpoints):
            left = self.slopes[i] * b + self.intercepts[i]
            right = self.slopes[i + 1] * b + self.intercepts[i + 1]
            tol = 1e-9 * max(1.0, abs(left), abs(right))
            if abs(left - right) > tol:
                raise ValueError(f"discontinuous at breakpoint {b}")

    @property
    def piece_count(self) -> int:
        return self.slopes.shape[0]

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        seg = np.searchsorted(self.breakpoints, x, side="right")
        return self.slopes[seg] * x + self.intercepts[seg]

    def simplify(self) -> "PwlFunction":
        """Merge adjacent segments with identical slope and intercept."""
        keep = []
        for i, b in enumerate(self.breakpoints):
            if (
                self.slopes[i] != self.slopes[i + 1]
                or self.intercepts[i] != self.intercepts[i + 1]
            ):
                keep.append(i)
        idx = np.array(keep, dtype=np.int64)
        segs = np.concatenate([idx, [self.slopes.shape[0] - 1]])
        return PwlFunction(
            self.breakpoints[idx], self.slopes[segs], self.intercepts[segs]
        )


def _segment_points(breakpoints: np.ndarray) -> np.ndarray:
    """One interior representative per segment (finite ends get +-1)."""
    k = breakpoints.shape[0]
    pts = np.empty(k + 1)
    if k == 0:
        pts[0] = 0.0
        return pts
    pts[0] = breakpoints[0] - 1.0
    pts[-1] = breakpoints[-1] + 1.0
    if k > 1:
        pts[1:-1] = (breakpoints[:-1] + breakpoints[1:]) / 2.0
    return pts


def exact_pwl(net, piece_cap: int = 10**6) -> PwlFunction:
    """The network's input->logit map as an explicit PWL function.

    Propagates a common breakpoint grid through the layers: affine maps mix
    slopes/intercepts, ReLU inserts a breakpoint at every zero crossing and
    clamps the negative side.  Raises ComplexityCapError past `piece_cap`
    pieces.
    """
    bp = np.zeros(0)
    slopes = np.ones((1, 1))      # (units, segments)
    intercepts = np.zeros((1, 1))

    for layer in net.layers:
        # affine
        slopes = layer.w @ slopes
        intercepts = layer.w @ intercepts + layer.b[:, None]
        if layer.activation == "relu":
            crossings = []
            for u in range(slopes.shape[0]):
                s = slopes[u]
                c = intercepts[u]
                nz = s != 0.0
                with np.errstate(divide="ignore", invalid="ignore"):
                    x = np.where(nz, -c / np.where(nz, s, 1.0), np.nan)
                lo = np.concatenate([[-np.inf], bp])
                hi = np.concatenate([bp, [np.inf]])
                inside = nz & (x > lo) & (x < hi)
                if inside.any():
                    crossings.append(x[inside])
            if crossings:
                new_bp = np.unique(np.concatenate([bp] + crossings))
            else:
                new_bp = bp
            if new_bp.shape[0] + 1 > piece_cap:
                raise ComplexityCapError(
                    f"{new_bp.shape[0] + 1} pieces exceeds cap {piece_cap}"
                )
            if new_bp.shape[0] != bp.shape[0]:
                seg_map = np.searchsorted(bp, _segment_points(new_bp), side="right")
                slopes = slopes[:, seg_map]
                intercepts = intercepts[:, seg_map]
                bp = new_bp
            # clamp negative segments to zero
            pts = _segment_points(bp)
            vals = slopes * pts[None, :] + intercepts
            neg = vals < 0.0
            slopes = np.where(neg, 0.0, slopes)
            intercepts = np.where(neg, 0.0, intercepts)

    return PwlFunction(bp, slopes[0], intercepts[0])


def decision_intervals(pwl: PwlFunction, level: float = 0.0):
    """{x : pwl(x) >= level} as a finite list of closed intervals.

    Interval ends use -inf/inf for unbounded sides.  This realizes, in one
    dimension, the fact that such decision sets are finite unions of cells.
    """
    bp = pwl.breakpoints
    k = bp.shape[0]
    edges_lo = np.concatenate([[-np.inf], bp])
    edges_hi = np.concatenate([bp, [np.inf]])
    intervals = []
    for i in range(k + 1):
        s = pwl.slopes[i]
        c = pwl.intercepts[i] - level
        lo, hi = edges_lo[i], edges_hi[i]
        if s == 0.0:
            if c >= 0.0:
                intervals.append((lo, hi))
            continue
        x0 = -c / s
        if s > 0.0:
            cand = (max(lo, x0), hi)
        else:
            cand = (lo, min(hi, x0))
        if cand[0] < cand[1] or (cand[0] == cand[1] and np.isfinite(cand[0])):
            intervals.append(cand)
    # merge touching/overlapping intervals
    merged = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def falsify_parity(net) -> int:
    """A natural the net provably misclassifies as even/odd.

    Reads the exact PWL map; beyond N = max(last breakpoint, last crossing
    of the decision level) the predicted class is constant, so of the two
    consecutive integers past N exactly one has the wrong parity.  The
    returned value is verified through the net's own forward pass.
    """
    pwl = exact_pwl(net)
    s = pwl.slopes[-1]
    c = pwl.intercepts[-1]
    has_bp = pwl.breakpoints.shape[0] > 0

    if not has_bp and s == 0.0:
        # globally constant logit: one of 0, 1 is already wrong
        cls = 1 if c >= 0.0 else 0
        n = 1 if cls == 1 else 0
        assert _misclassifies_parity(net, n)
        return n

    x_star = (0.0 - c) / s if s != 0.0 else -math.inf
    last_bp = float(pwl.breakpoints[-1]) if has_bp else -math.inf
    tail = max(last_bp, x_star, 0.0)
    m = 2 * math.ceil(tail / 2.0) + 2
    even_class = 1 if (pwl(float(m)) >= 0.0) else 0
    n = m + 1 if even_class == 1 else m
    assert _misclassifies_parity(net, n)
    return n


def _misclassifies_parity(net, n: int) -> bool:
    predicted_even = bool(net.forward(float(n))[0] >= 0.0)
    return predicted_even != (n % 2 == 0)
