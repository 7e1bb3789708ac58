"""Code-length proxy for how much information training stored in the weights.

The weight deltas (after - before) are quantized at a fixed resolution and
coded against a zero-centered discretized Gaussian prior.  We report the
code length relative to the all-zero-delta baseline, so an untouched net
costs exactly 0 bits and every moved weight costs the extra bits its bin
needs beyond the zero bin.  Resolution and prior scale are part of the
declared measure, not tuning knobs.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

DEFAULT_RESOLUTION = 0.01
DEFAULT_PRIOR_SCALE = 1.0

_TINY = 1e-300


def _bin_mass(bins: np.ndarray, resolution: float, prior_scale: float):
    hi = ndtr((bins + 0.5) * resolution / prior_scale)
    lo = ndtr((bins - 0.5) * resolution / prior_scale)
    return np.maximum(hi - lo, _TINY)


def delta_code_length_bits(
    before: np.ndarray,
    after: np.ndarray,
    resolution: float = DEFAULT_RESOLUTION,
    prior_scale: float = DEFAULT_PRIOR_SCALE,
) -> float:
    """Bits to code the quantized weight deltas, relative to all-zero deltas."""
    if resolution <= 0 or prior_scale <= 0:
        raise ValueError("resolution and prior scale must be positive")
    before = np.asarray(before, dtype=np.float64).ravel()
    after = np.asarray(after, dtype=np.float64).ravel()
    if before.shape != after.shape:
        raise ValueError("weight vectors must have identical shapes")
    bins = np.rint((after - before) / resolution)
    mass = _bin_mass(bins, resolution, prior_scale)
    zero_mass = _bin_mass(np.zeros(1), resolution, prior_scale)[0]
    return float(np.sum(np.log2(zero_mass) - np.log2(mass)))


def complexity_bits(
    net_before,
    net_after,
    resolution: float = DEFAULT_RESOLUTION,
    prior_scale: float = DEFAULT_PRIOR_SCALE,
) -> float:
    """delta_code_length_bits over two same-shape networks."""
    wb = net_before.flat_weights()
    wa = net_after.flat_weights()
    if wb.shape != wa.shape:
        raise ValueError("networks must share shapes")
    return delta_code_length_bits(wb, wa, resolution, prior_scale)
