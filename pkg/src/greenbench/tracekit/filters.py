"""Smoothing and sensor-noise estimation for power series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trace import PowerSeries

MIN_NOISE_SAMPLES = 30


def moving_average(series: PowerSeries, window: int = 101) -> PowerSeries:
    """Centered moving mean; windows are truncated at both edges.

    Output has the same length as the input.
    """
    n = len(series)
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ValueError(f"window must be an odd positive integer, got {window}")
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    window = int(window)
    if window == 1:
        return series
    x = series.watts
    # offsetting by the first sample keeps cumulative sums small and makes
    # constant series come back bit-for-bit
    ref = x[0]
    cs = np.concatenate(([0.0], np.cumsum(x - ref)))
    half = window // 2
    idx = np.arange(n)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    smoothed = (cs[hi] - cs[lo]) / (hi - lo) + ref
    return series.with_watts(smoothed)


@dataclass(frozen=True)
class NoiseProfile:
    sigma_w: float
    n_samples: int

    def __post_init__(self):
        if not self.sigma_w >= 0:
            raise ValueError("sigma_w must be >= 0")
        if self.n_samples < MIN_NOISE_SAMPLES:
            raise ValueError(f"noise profile needs >= {MIN_NOISE_SAMPLES} samples")


def estimate_noise(calibration: PowerSeries) -> NoiseProfile:
    """Sample standard deviation of a step-free capture.

    A capture that contains a step still returns a number, just an inflated
    one; nothing here checks that the capture is flat.
    """
    n = len(calibration)
    if n < MIN_NOISE_SAMPLES:
        raise ValueError(f"calibration sample has {n} points; need >= {MIN_NOISE_SAMPLES}")
    x = calibration.watts
    resid = x - x.mean()
    return NoiseProfile(float(np.sqrt(np.dot(resid, resid) / (n - 1))), n)
