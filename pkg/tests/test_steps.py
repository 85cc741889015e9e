import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import three_step_schedule
from greenbench.phases import PhaseSchedule
from greenbench.powersim import PowerModelSpec, simulate_trace
from greenbench.tracekit import combine_channels
from greenbench.tracekit.filters import NoiseProfile
from greenbench.tracekit.steps import (
    DetectParams,
    StepModel,
    detect_steps,
    format_step_csv,
    integrate_energy,
    mean_shift_statistic,
    parse_step_csv,
    render,
    segment_phases,
)
from greenbench.tracekit.trace import PowerSeries

NOISE2 = NoiseProfile(2.0, 1000)
QUIET = NoiseProfile(0.0, 1000)


def noisy_three_step(seed, sigma=2.0):
    spec = PowerModelSpec(idle_w=30.0, phase_levels={"kernel": 150.0}, noise_sigma_w=sigma, rng_seed=seed)
    trace, truth = simulate_trace(spec, three_step_schedule())
    return combine_channels(trace), truth


def test_statistic_oracle():
    rng = np.random.default_rng(0)
    x = rng.normal(size=60)
    w = 7
    d = mean_shift_statistic(x, w)
    for i in range(x.size):
        if w <= i <= x.size - w:
            assert d[i] == pytest.approx(x[i : i + w].mean() - x[i - w : i].mean(), abs=1e-12)
        else:
            assert d[i] == 0.0


def test_noiseless_exact():
    series, truth = noisy_three_step(0, sigma=0.0)
    model = detect_steps(series, QUIET)
    assert len(model) == 3
    np.testing.assert_array_equal(model.levels, truth.levels)
    np.testing.assert_allclose(model.starts, truth.starts, atol=1e-3 + 1e-12)
    assert model.end_s == truth.end_s


def test_noisy_recovery_rate():
    hits = 0
    for seed in range(100):
        series, truth = noisy_three_step(seed)
        m = detect_steps(series, NOISE2, DetectParams(window=50, k=6))
        if (
            len(m) == 3
            and np.all(np.abs(m.levels - truth.levels) <= 1.0)
            and np.all(np.abs(m.starts - truth.starts) <= 0.05)
        ):
            hits += 1
    assert hits >= 95


def test_constant_series_single_step():
    rng = np.random.default_rng(5)
    s = PowerSeries(1e-3, 0.0, 30.0 + rng.normal(0, 2.0, 3000))
    m = detect_steps(s, NOISE2)
    assert len(m) == 1
    assert m.levels[0] == pytest.approx(30.0, abs=0.2)


@pytest.mark.parametrize("scale", [0.25, 2.0, 8.0])
def test_scale_equivariance(scale):
    series, _ = noisy_three_step(9)
    base = detect_steps(series, NOISE2)
    scaled = detect_steps(series.with_watts(series.watts * scale), NoiseProfile(2.0 * scale, 1000))
    np.testing.assert_array_equal(scaled.starts, base.starts)
    np.testing.assert_array_equal(scaled.levels, base.levels * scale)


def test_short_series_rejected():
    with pytest.raises(ValueError):
        detect_steps(PowerSeries(1e-3, 0.0, np.zeros(99)), NOISE2)


@pytest.mark.parametrize("kw", [dict(window=3), dict(k=0), dict(min_segment=0), dict(window=10.5)])
def test_bad_params(kw):
    with pytest.raises(ValueError):
        DetectParams(**kw)


@settings(max_examples=50, deadline=None)
@given(
    lengths=st.lists(st.integers(2, 30), min_size=1, max_size=6),
    levels=st.data(),
    t0=st.integers(-50, 50),
)
def test_render_round_trip(lengths, levels, t0):
    dt = 0.25  # binary fraction keeps boundaries exact
    vals = [levels.draw(st.floats(0, 500, allow_nan=False)) for _ in lengths]
    starts = t0 * dt + dt * np.concatenate(([0], np.cumsum(lengths)[:-1]))
    end = t0 * dt + dt * sum(lengths)
    model = StepModel.from_levels(starts, vals, end)
    s = render(model, dt)
    assert len(s) == sum(lengths)
    assert np.array_equal(s.watts, np.repeat(vals, lengths))
    assert s.end_s == pytest.approx(end)


def test_energy_examples():
    m = StepModel.from_levels([0.0, 1.0, 3.0], [30.0, 150.0, 30.0], 4.0)
    assert integrate_energy(m, 0.0, 4.0) == pytest.approx(30 + 300 + 30)
    assert integrate_energy(m, 0.5, 1.5) == pytest.approx(15 + 75)
    const = StepModel.from_levels([0.0], [100.201], 0.313)
    assert round(integrate_energy(const, 0.0, 0.313), 3) == 31.363


def test_energy_zero_width_and_bounds():
    m = StepModel.from_levels([0.0], [10.0], 1.0)
    assert integrate_energy(m, 0.5, 0.5) == 0.0
    with pytest.raises(ValueError):
        integrate_energy(m, 0.7, 0.2)
    with pytest.raises(ValueError):
        integrate_energy(m, -0.1, 0.5)
    with pytest.raises(ValueError):
        integrate_energy(m, 0.0, 1.5)
    with pytest.raises(TypeError):
        integrate_energy([1, 2], 0, 1)


def test_series_energy_left_riemann():
    s = PowerSeries(0.5, 0.0, [2.0, 4.0, 6.0])
    assert integrate_energy(s, 0.0, 1.5) == pytest.approx(6.0)
    assert integrate_energy(s, 0.25, 0.75) == pytest.approx(0.25 * 2 + 0.25 * 4)


bounded = st.floats(0.0, 4.0, allow_nan=False)


@settings(max_examples=100, deadline=None)
@given(a=bounded, b=bounded, c=bounded)
def test_energy_additive_and_nonnegative(a, b, c):
    a, b, c = sorted((a, b, c))
    m = StepModel.from_levels([0.0, 1.0, 3.0], [30.0, 150.0, 30.0], 4.0)
    s = render(m, 1e-3)
    for src in (m, s):
        whole = integrate_energy(src, a, c)
        parts = integrate_energy(src, a, b) + integrate_energy(src, b, c)
        assert whole >= 0
        assert abs(whole - parts) <= 1e-12 * max(1.0, whole)


def test_segment_phases():
    m = StepModel.from_levels([0.0, 1.0, 3.0], [30.0, 150.0, 30.0], 4.0)
    reports = segment_phases(m, three_step_schedule())
    assert [r.phase for r in reports] == ["idle", "kernel", "idle"]
    assert [r.mean_power_w for r in reports] == pytest.approx([30.0, 150.0, 30.0])
    assert [r.energy_j for r in reports] == pytest.approx([30.0, 300.0, 30.0])
    for r in reports:
        assert r.energy_j == pytest.approx(r.mean_power_w * r.duration_s, rel=1e-12)


def test_segment_phases_partial_overlap():
    m = StepModel.from_levels([0.0, 1.0], [10.0, 20.0], 2.0)
    sched = PhaseSchedule.from_durations([("a", 0.5), ("b", 1.0)], start_s=0.5)
    a, b = segment_phases(m, sched)
    assert a.mean_power_w == pytest.approx(10.0)
    assert b.energy_j == pytest.approx(20.0)
    with pytest.raises(ValueError):
        segment_phases(m, PhaseSchedule.from_durations([("a", 3.0)]))


def test_step_csv_round_trip():
    m = StepModel.from_levels([0.0, 1.0, 3.0], [30.0, 150.25, 30.0], 4.0)
    text = format_step_csv(m)
    assert text.splitlines()[0] == "start_s,end_s,level_w"
    assert text.splitlines()[2] == "1.000000000,3.000000000,150.250000000"
    assert parse_step_csv(text) == m


def test_step_model_validation():
    with pytest.raises(ValueError):
        StepModel((), 1.0)
    with pytest.raises(ValueError):
        StepModel.from_levels([0.0, 0.0], [1.0, 2.0], 1.0)
    with pytest.raises(ValueError):
        StepModel.from_levels([0.0], [1.0], 0.0)
    with pytest.raises(ValueError):
        StepModel.from_levels([0.0], [math.inf], 1.0)
