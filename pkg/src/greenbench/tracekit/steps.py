"""Step models of power series: detection, rendering, energy, phase reports.

GPU power draw is close to piecewise constant, one level per execution
phase. :func:`detect_steps` recovers that shape from a noisy series using a
two-sided sliding-window mean-shift statistic calibrated on a sample of
sensor noise.

Detector
--------
For every sample index ``i`` with a full window on each side::

    D[i] = mean(x[i:i+w]) - mean(x[i-w:i])

Without a step, ``D[i]`` has standard deviation ``sigma * sqrt(2/w)``. A
change point is declared at ``i`` when ``|D[i]| > k * sigma * sqrt(2/w)``
and ``|D[i]|`` is the largest value within ``w - 1`` samples on either side.
Candidates closer than the minimum segment length are thinned, strongest
first. Segment levels are the means of the samples between change points;
neighbours whose levels differ by less than the merge threshold
``max(3 * sigma * sqrt(2/w), merge_floor_w)`` are fused.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.ndimage import maximum_filter1d

from .._io import atomic_write_text, fmt_float
from ..phases import PhaseSchedule
from .filters import NoiseProfile
from .trace import PowerSeries

STEP_HEADER = ("start_s", "end_s", "level_w")
PHASE_REPORT_HEADER = ("phase", "duration_s", "mean_power_w", "energy_j")
# relative slack on integration bounds, absorbs decimal round-off in schedules
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class Step:
    start_s: float
    level_w: float


@dataclass(frozen=True)
class StepModel:
    steps: tuple[Step, ...]
    end_s: float

    def __post_init__(self):
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise ValueError("a step model needs at least one step")
        starts = [s.start_s for s in steps]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("step start times must be strictly increasing")
        if not self.end_s > starts[-1]:
            raise ValueError("end_s must come after the last step start")
        if not all(math.isfinite(s.level_w) and math.isfinite(s.start_s) for s in steps):
            raise ValueError("step levels and times must be finite")

    @classmethod
    def from_levels(cls, starts: Sequence[float], levels: Sequence[float], end_s: float) -> StepModel:
        return cls(tuple(Step(float(t), float(v)) for t, v in zip(starts, levels)), float(end_s))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def t0(self) -> float:
        return self.steps[0].start_s

    @property
    def starts(self) -> np.ndarray:
        return np.array([s.start_s for s in self.steps])

    @property
    def levels(self) -> np.ndarray:
        return np.array([s.level_w for s in self.steps])

    def segment_bounds(self) -> list[tuple[float, float, float]]:
        """``(start, end, level)`` for each step."""
        ends = [s.start_s for s in self.steps[1:]] + [self.end_s]
        return [(s.start_s, e, s.level_w) for s, e in zip(self.steps, ends)]

    def level_at(self, t: float) -> float:
        i = int(np.searchsorted(self.starts, t, side="right")) - 1
        return self.steps[max(i, 0)].level_w


@dataclass(frozen=True)
class DetectParams:
    window: int = 50
    k: float = 6.0
    min_segment: Optional[int] = None  # defaults to window
    merge_floor_w: float = 0.5

    def __post_init__(self):
        if int(self.window) != self.window or self.window < 4:
            raise ValueError(f"window must be an integer >= 4, got {self.window}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.min_segment is not None and self.min_segment < 1:
            raise ValueError("min_segment must be >= 1")
        if not self.merge_floor_w >= 0:
            raise ValueError("merge_floor_w must be >= 0")

    @property
    def segment_floor(self) -> int:
        return int(self.min_segment if self.min_segment is not None else self.window)

    def threshold(self, sigma_w: float) -> float:
        return self.k * sigma_w * math.sqrt(2.0 / self.window)

    def merge_threshold(self, sigma_w: float) -> float:
        return max(3.0 * sigma_w * math.sqrt(2.0 / self.window), self.merge_floor_w)


def sample_boundary(series_t0: float, dt: float, t: float) -> int:
    """Index of the first sample taken at or after time ``t``."""
    return int(math.ceil((t - series_t0) / dt - 1e-9))


def mean_shift_statistic(x: np.ndarray, window: int) -> np.ndarray:
    """``D[i]`` for every index; entries without two full windows are 0."""
    n = x.size
    w = window
    d = np.zeros(n)
    if n < 2 * w:
        return d
    cs = np.concatenate(([0.0], np.cumsum(x - x[0])))
    i = np.arange(w, n - w + 1)
    d[w : n - w + 1] = ((cs[i + w] - cs[i]) - (cs[i] - cs[i - w])) / w
    return d


def _change_points(x: np.ndarray, sigma: float, params: DetectParams) -> list[int]:
    w = params.window
    d = np.abs(mean_shift_statistic(x, w))
    # relative floor swallows cumulative-sum round-off on noiseless input
    thresh = max(params.threshold(sigma), 1e-9 * float(np.max(np.abs(x))))
    peak = maximum_filter1d(d, size=2 * w - 1, mode="constant", cval=0.0)
    candidates = np.flatnonzero((d > thresh) & (d >= peak))
    order = sorted(candidates.tolist(), key=lambda i: (-d[i], i))
    accepted: list[int] = []
    gap = params.segment_floor
    for i in order:
        if all(abs(i - j) >= gap for j in accepted):
            accepted.append(i)
    return sorted(accepted)


def _merge_segments(x: np.ndarray, bounds: list[int], merge_w: float) -> list[int]:
    bounds = list(bounds)
    while len(bounds) > 2:
        levels = [x[a:b].mean() for a, b in zip(bounds, bounds[1:])]
        gaps = [abs(b - a) for a, b in zip(levels, levels[1:])]
        j = int(np.argmin(gaps))
        if gaps[j] >= merge_w:
            break
        del bounds[j + 1]
    return bounds


def detect_steps(series: PowerSeries, noise: NoiseProfile, params: Optional[DetectParams] = None) -> StepModel:
    """Piecewise-constant model of ``series``; see the module docstring."""
    params = params or DetectParams()
    x = series.watts
    n = x.size
    if n < 2 * params.window:
        raise ValueError(f"series of {n} samples is shorter than two windows ({2 * params.window})")
    sigma = noise.sigma_w
    bounds = [0] + _change_points(x, sigma, params) + [n]
    bounds = _merge_segments(x, bounds, params.merge_threshold(sigma))
    dt, t0 = series.sample_period, series.t0
    steps = tuple(Step(t0 + a * dt, float(x[a:b].mean())) for a, b in zip(bounds, bounds[1:]))
    return StepModel(steps, series.end_s)


def render(model: StepModel, sample_period: float, n_samples: Optional[int] = None) -> PowerSeries:
    """Sample a step model at ``model.t0 + i * sample_period``."""
    t0 = model.t0
    if n_samples is None:
        n_samples = int(round((model.end_s - t0) / sample_period))
    watts = np.empty(n_samples)
    edges = [sample_boundary(t0, sample_period, s) for s in model.starts] + [n_samples]
    for (a, b), level in zip(zip(edges, edges[1:]), model.levels):
        watts[max(a, 0) : max(min(b, n_samples), 0)] = level
    return PowerSeries(sample_period, t0, watts)


def _check_bounds(t_start: float, t_end: float, lo: float, hi: float) -> tuple[float, float]:
    slack = BOUND_SLACK * max(1.0, abs(lo), abs(hi))
    if t_end < t_start:
        raise ValueError(f"inverted integration bounds: [{t_start}, {t_end}]")
    if t_start < lo - slack or t_end > hi + slack:
        raise ValueError(f"window [{t_start}, {t_end}] lies outside the span [{lo}, {hi}]")
    return max(t_start, lo), min(t_end, hi)


def _series_cumulative(series: PowerSeries, t: float, prefix: np.ndarray) -> float:
    dt = series.sample_period
    n = len(series)
    pos = (t - series.t0) / dt
    k = min(max(int(math.floor(pos)), 0), n)
    frac = pos - k
    partial = series.watts[k] * frac * dt if k < n and frac > 0 else 0.0
    return float(prefix[k] + partial)


def integrate_energy(source: Union[StepModel, PowerSeries], t_start: float, t_end: float) -> float:
    """Joules drawn over ``[t_start, t_end]``.

    Step models integrate exactly. A raw series is treated as holding each
    sample for one sample period (left-Riemann), integrated exactly over
    partial periods at the window edges.
    """
    if isinstance(source, StepModel):
        a, b = _check_bounds(t_start, t_end, source.t0, source.end_s)
        if a == b:
            return 0.0
        total = 0.0
        for s, e, level in source.segment_bounds():
            overlap = min(b, e) - max(a, s)
            if overlap > 0:
                total += level * overlap
        return total
    if isinstance(source, PowerSeries):
        a, b = _check_bounds(t_start, t_end, source.t0, source.end_s)
        if a == b:
            return 0.0
        prefix = np.concatenate(([0.0], np.cumsum(source.watts * source.sample_period)))
        return _series_cumulative(source, b, prefix) - _series_cumulative(source, a, prefix)
    raise TypeError(f"cannot integrate {type(source).__name__}")


@dataclass(frozen=True)
class PhaseReport:
    phase: str
    duration_s: float
    mean_power_w: float
    energy_j: float


def segment_phases(source: Union[StepModel, PowerSeries], schedule: PhaseSchedule) -> list[PhaseReport]:
    reports = []
    for ph in schedule:
        energy = integrate_energy(source, ph.start_s, ph.end_s)
        duration = ph.duration_s
        reports.append(PhaseReport(ph.name, duration, energy / duration, energy))
    return reports


def format_step_csv(model: StepModel) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(STEP_HEADER)
    for s, e, level in model.segment_bounds():
        writer.writerow((fmt_float(s), fmt_float(e), fmt_float(level)))
    return out.getvalue()


def parse_step_csv(text: str) -> StepModel:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or tuple(rows[0]) != STEP_HEADER:
        raise ValueError("step CSV must start with header start_s,end_s,level_w")
    body = [[float(c) for c in r] for r in rows[1:]]
    if not body:
        raise ValueError("step CSV has no rows")
    return StepModel.from_levels([r[0] for r in body], [r[2] for r in body], body[-1][1])


def write_step_csv(model: StepModel, path) -> None:
    atomic_write_text(path, format_step_csv(model))


def format_phase_reports_csv(reports: Sequence[PhaseReport]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(PHASE_REPORT_HEADER)
    for r in reports:
        writer.writerow((r.phase, fmt_float(r.duration_s), fmt_float(r.mean_power_w), fmt_float(r.energy_j)))
    return out.getvalue()


def write_phase_reports_csv(reports: Sequence[PhaseReport], path) -> None:
    atomic_write_text(path, format_phase_reports_csv(reports))
