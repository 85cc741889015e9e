import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenbench.tracekit.filters import NoiseProfile, estimate_noise, moving_average
from greenbench.tracekit.trace import PowerSeries


def series(x, dt=1e-3):
    return PowerSeries(dt, 0.0, np.asarray(x, dtype=float))


def test_window_one_is_identity():
    s = series([1.0, 5.0, 2.0])
    assert np.array_equal(moving_average(s, 1).watts, s.watts)


def test_truncated_edges_oracle():
    x = np.array([1.0, 2.0, 6.0, 3.0, 8.0])
    got = moving_average(series(x), 3).watts
    expected = [np.mean(x[max(i - 1, 0) : i + 2]) for i in range(5)]
    np.testing.assert_allclose(got, expected, rtol=1e-15)


@settings(max_examples=40, deadline=None)
@given(c=st.floats(-1e4, 1e4, allow_nan=False), n=st.integers(5, 300), w=st.sampled_from([1, 3, 5, 101]))
def test_constant_series_unchanged(c, n, w):
    if w > n:
        return
    out = moving_average(series(np.full(n, c)), w).watts
    assert np.array_equal(out, np.full(n, c))


def test_length_preserved_and_mean_preserved_for_padded_ends():
    rng = np.random.default_rng(3)
    core = rng.normal(0, 1, 500)
    x = np.concatenate((np.full(60, 4.0), core + 4.0, np.full(60, 4.0)))
    out = moving_average(series(x), 101).watts
    assert out.size == x.size
    # interior windows are full, so the centered sum telescopes
    assert abs(out[50:-50].mean() - x[50:-50].mean()) < 0.05


def test_noise_reduced_by_sqrt_window():
    # flat 30 W then 150 W, sigma 2; residual std inside plateaus ~ 2/sqrt(101)
    sigma, w = 2.0, 101
    ratios = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        clean = np.concatenate((np.full(1000, 30.0), np.full(1000, 150.0)))
        out = moving_average(series(clean + rng.normal(0, sigma, clean.size)), w).watts
        plateau = np.concatenate((out[100:900], out[1100:1900]))
        truth = np.concatenate((clean[100:900], clean[1100:1900]))
        ratios.append(np.std(plateau - truth))
    assert np.mean(ratios) == pytest.approx(sigma / math.sqrt(w), rel=0.1)


@pytest.mark.parametrize("w", [0, 2, -3, 1.5])
def test_bad_window(w):
    with pytest.raises(ValueError):
        moving_average(series(np.zeros(10)), w)


def test_window_longer_than_series():
    with pytest.raises(ValueError):
        moving_average(series(np.zeros(10)), 11)


def test_estimate_noise_range():
    rng = np.random.default_rng(11)
    prof = estimate_noise(series(30.0 + rng.normal(0, 2.0, 1000)))
    assert 1.8 <= prof.sigma_w <= 2.2
    assert prof.n_samples == 1000


def test_estimate_noise_unbiased_formula():
    x = [1.0, 2.0, 3.0, 4.0] * 10
    assert estimate_noise(series(x)).sigma_w == pytest.approx(np.std(x, ddof=1), rel=1e-14)


def test_estimate_noise_needs_samples():
    with pytest.raises(ValueError):
        estimate_noise(series(np.zeros(29)))
    with pytest.raises(ValueError):
        NoiseProfile(-1.0, 100)
