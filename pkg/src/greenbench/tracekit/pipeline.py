from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..phases import PhaseSchedule
from .filters import NoiseProfile, moving_average
from .steps import DetectParams, PhaseReport, StepModel, detect_steps, segment_phases
from .trace import PowerSeries, PowerTrace, combine_channels


@dataclass
class TraceAnalysis:
    series: PowerSeries
    model: StepModel
    phases: Optional[list[PhaseReport]]


def analyze_trace(
    trace: PowerTrace,
    noise: NoiseProfile,
    params: Optional[DetectParams] = None,
    schedule: Optional[PhaseSchedule] = None,
    filter_window: int = 1,
) -> TraceAnalysis:
    """Single-acquisition pipeline: combine, optionally smooth, detect, segment.

    ``noise`` must describe the unsmoothed sensor noise; smoothing is for
    display and the detector threshold is set from raw-noise statistics.
    """
    series = combine_channels(trace)
    if filter_window > 1:
        series = moving_average(series, filter_window)
    model = detect_steps(series, noise, params)
    phases = segment_phases(model, schedule) if schedule is not None else None
    return TraceAnalysis(series, model, phases)
