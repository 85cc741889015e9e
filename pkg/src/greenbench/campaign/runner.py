"""Campaign orchestration.

For each experiment and repetition: run the kernel benchmark, build the
phase schedule, obtain a trace (simulated, or the next dump from
``trace_dir``), check that power came back to idle, then detect steps.
Successful repetitions are grouped by pattern, the most common pattern is
averaged, and its kernel phase gives the report row.
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..lacore.bench import BenchmarkResult, modeled_kernel_time, run_kernel_benchmark
from ..lacore.csr import CsrMatrix
from ..lacore.mmio import read_matrix_market
from ..matrixgen import GridSpec, generate_gravity_matrix
from ..phases import BENCH_PHASES, PhaseSchedule, mean_schedule, read_schedule_csv
from ..powersim import calibration_trace, inject_spike, simulate_trace, with_seed
from ..tracekit.filters import NoiseProfile, estimate_noise
from ..tracekit.pipeline import analyze_trace
from ..tracekit.steps import StepModel, segment_phases
from ..tracekit.trace import PowerTrace, combine_channels, read_trace
from .config import CampaignConfig, ExperimentConfig
from .patterns import match_patterns, select_and_aggregate
from .report import CampaignReport, ReportRow, emit_report

log = logging.getLogger(__name__)

CALIBRATION_STREAM = 1_000_000
IDLE_TOLERANCE_FLOOR_W = 1e-6


@dataclass
class Acquisition:
    repetition: int
    kernel_time_s: float
    schedule: PhaseSchedule
    model: Optional[StepModel] = None
    draws: int = 0
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None


@dataclass
class ExperimentResult:
    row: ReportRow
    acquisitions: list[Acquisition] = field(default_factory=list)
    groups: list[list[int]] = field(default_factory=list)
    aggregate_model: Optional[StepModel] = None


def _operand(exp: ExperimentConfig) -> tuple[Optional[int], Optional[CsrMatrix]]:
    if exp.kernel not in ("spmv", "cg"):
        return exp.size, None
    if exp.matrix is not None:
        return None, read_matrix_market(exp.matrix)
    if exp.grid is not None:
        return None, generate_gravity_matrix(GridSpec(*exp.grid))[0]
    return exp.size, None


def _modeled_schedule(bench: BenchmarkResult, cfg: CampaignConfig, kernel_time: float) -> PhaseSchedule:
    bw = cfg.bandwidth_bytes_per_s
    transfer = 2 * bench.n * 8 / bw
    durations = {
        "idle": cfg.min_phase_s,
        "alloc_copy": transfer,
        "kernel": kernel_time * len(bench.samples_s),
        "copy_back": bench.n * 8 / bw,
    }
    return PhaseSchedule.from_durations((name, durations[name]) for name in BENCH_PHASES)


def _noise_profile(exp: ExperimentConfig, cfg: CampaignConfig, index: int) -> NoiseProfile:
    if exp.simulated:
        spec = with_seed(exp.model, [cfg.seed, index, CALIBRATION_STREAM])
        return estimate_noise(combine_channels(calibration_trace(spec, cfg.calibration_s)))
    return estimate_noise(combine_channels(read_trace(exp.noise_trace)))


def _stuck_schedule(schedule: PhaseSchedule) -> PhaseSchedule:
    """The GPU never drops back to idle: the trailing phase stays busy."""
    last = schedule[-1]
    return PhaseSchedule(schedule.phases[:-1] + (replace(last, name="stuck"),))


def _acquire(exp, cfg, index, rep, schedule, noise, idle_tol) -> tuple[Optional[StepModel], int, Optional[str]]:
    """Obtain and analyse one trace; returns (model, draws used, failure reason)."""
    idle_w = exp.model.idle_w
    if exp.simulated:
        sim_schedule = inject_spike(schedule) if rep in exp.spike_reps else schedule
        levels = dict(exp.model.phase_levels)
        levels["stuck"] = exp.model.level("kernel")
        base_spec = replace(exp.model, phase_levels=levels)
        reason = None
        for draw in range(cfg.max_rewaits + 1):
            this_schedule = _stuck_schedule(sim_schedule) if draw < exp.stuck_draws else sim_schedule
            spec = with_seed(base_spec, [cfg.seed, index, rep, draw])
            trace, _ = simulate_trace(spec, this_schedule)
            model, reason = _analyse(trace, noise, cfg, idle_w, idle_tol)
            if reason is None:
                return model, draw + 1, None
            log.info("%s rep %d draw %d: %s; waiting again", exp.name, rep, draw, reason)
        return None, cfg.max_rewaits + 1, f"{reason} after {cfg.max_rewaits} re-waits"

    path = Path(exp.trace_dir) / f"rep_{rep:03d}.trace"
    if not path.exists():
        raise FileNotFoundError(f"missing external trace {path}")
    model, reason = _analyse(read_trace(path), noise, cfg, idle_w, idle_tol)
    return model, 1, reason


def _analyse(trace: PowerTrace, noise, cfg, idle_w, idle_tol) -> tuple[Optional[StepModel], Optional[str]]:
    try:
        model = analyze_trace(trace, noise, cfg.detect, filter_window=cfg.filter_window).model
    except ValueError as exc:
        return None, f"detection failed: {exc}"
    tail = model.steps[-1].level_w
    if abs(tail - idle_w) > idle_tol:
        return None, f"trailing level {tail:.3f} W not within {idle_tol:.3f} W of idle"
    return model, None


def run_experiment(exp: ExperimentConfig, cfg: CampaignConfig, index: int) -> ExperimentResult:
    size, matrix = _operand(exp)
    noise = _noise_profile(exp, cfg, index)
    idle_tol = cfg.idle_tolerance_w
    if idle_tol is None:
        idle_tol = max(3.0 * noise.sigma_w, IDLE_TOLERANCE_FLOOR_W)

    acquisitions = []
    n = None
    for rep in range(exp.repetitions):
        bench = run_kernel_benchmark(
            exp.kernel, size=size, matrix=matrix, repetitions=exp.bench_repetitions,
            seed=[cfg.seed, index, rep], workers=cfg.workers,
        )
        n = bench.n
        if cfg.timing == "model":
            kernel_time = modeled_kernel_time(
                exp.kernel, bench.n, bench.nnz or 0, bench.cg_iterations or 0, cfg.bandwidth_bytes_per_s
            )
            schedule = _modeled_schedule(bench, cfg, kernel_time).held(cfg.min_phase_s)
        else:
            kernel_time = bench.kernel_time_s
            schedule = bench.schedule.held(cfg.min_phase_s)
        if not exp.simulated:
            sched_file = Path(exp.trace_dir) / f"rep_{rep:03d}.schedule.csv"
            if sched_file.exists():
                schedule = read_schedule_csv(sched_file)
        model, draws, failure = _acquire(exp, cfg, index, rep, schedule, noise, idle_tol)
        if failure:
            log.warning("%s rep %d failed: %s", exp.name, rep, failure)
        acquisitions.append(Acquisition(rep, kernel_time, schedule, model, draws, failure))

    good = [a for a in acquisitions if a.ok]
    failed = len(acquisitions) - len(good)
    if not good:
        row = ReportRow(exp.name, n, math.nan, math.nan, math.nan, 0, exp.repetitions, failed, "failed")
        return ExperimentResult(row, acquisitions)

    models = [a.model for a in good]
    groups = match_patterns(models, cfg.pattern_tolerance)
    agg = select_and_aggregate(models, groups)
    chosen = [good[i] for i in agg.members]
    time_s = float(statistics.median(a.kernel_time_s for a in chosen))
    schedule = mean_schedule([a.schedule for a in chosen])
    kernel_report = next(r for r in segment_phases(agg.model, schedule) if r.phase == "kernel")
    power = kernel_report.mean_power_w
    row = ReportRow(
        exp.name, n, time_s, power, power * time_s, agg.support, exp.repetitions, failed,
        "ok" if failed == 0 else "partial",
    )
    groups_acq = [[good[i].repetition for i in g] for g in groups]
    return ExperimentResult(row, acquisitions, groups_acq, agg.model)


def run_campaign(config: CampaignConfig, output=None) -> CampaignReport:
    """Run every experiment in config order and write the report if a path is known."""
    report = CampaignReport()
    for index, exp in enumerate(config.experiments):
        log.info("experiment %s (%s x%d)", exp.name, exp.kernel, exp.repetitions)
        report.rows.append(run_experiment(exp, config, index).row)
    path = output if output is not None else config.output
    if path is not None:
        emit_report(report, path)
    return report
