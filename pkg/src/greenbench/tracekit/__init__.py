"""Power-trace ingestion and analysis."""

from .filters import NoiseProfile, estimate_noise, moving_average
from .pipeline import TraceAnalysis, analyze_trace
from .steps import (
    DetectParams,
    PhaseReport,
    Step,
    StepModel,
    detect_steps,
    format_phase_reports_csv,
    format_step_csv,
    integrate_energy,
    parse_step_csv,
    render,
    segment_phases,
    write_phase_reports_csv,
    write_step_csv,
)
from .trace import (
    Channel,
    PowerSeries,
    PowerTrace,
    combine_channels,
    normalize_trace_text,
    parse_trace,
    read_trace,
    serialize_trace,
    write_trace,
)

__all__ = [
    "Channel",
    "DetectParams",
    "NoiseProfile",
    "PhaseReport",
    "PowerSeries",
    "PowerTrace",
    "Step",
    "StepModel",
    "TraceAnalysis",
    "analyze_trace",
    "combine_channels",
    "detect_steps",
    "estimate_noise",
    "format_phase_reports_csv",
    "format_step_csv",
    "integrate_energy",
    "moving_average",
    "normalize_trace_text",
    "parse_step_csv",
    "parse_trace",
    "read_trace",
    "render",
    "segment_phases",
    "serialize_trace",
    "write_phase_reports_csv",
    "write_step_csv",
    "write_trace",
]
