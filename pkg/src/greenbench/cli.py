"""Command-line entry point: ``greenbench <subcommand> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on data or
validation errors; diagnostics go to stderr as one line.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ._io import atomic_write_text

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _cmd_gen_matrix(args) -> None:
    from .lacore.mmio import write_matrix_market, write_vector
    from .matrixgen import AnomalyBox, GridSpec, generate_gravity_matrix

    anomaly = AnomalyBox.centered(args.lx, args.ly, args.lz, delta_rho=args.drho)
    spec = GridSpec(args.nx, args.ny, args.nz, args.lx, args.ly, args.lz, anomaly)
    A, rhs = generate_gravity_matrix(spec)
    out = Path(args.output)
    rhs_path = Path(args.rhs) if args.rhs else out.with_suffix(".rhs.txt")
    comment = f"Q1 gravity matrix nx={spec.nx} ny={spec.ny} nz={spec.nz} lx={spec.lx} ly={spec.ly} lz={spec.lz}"
    write_matrix_market(A, out, comment)
    write_vector(rhs, rhs_path)


def _cmd_stats(args) -> None:
    from .lacore.mmio import read_matrix_market
    from .matrixgen import STATS_HEADER, matrix_stats

    stats = matrix_stats(read_matrix_market(args.input))
    if args.header:
        print(STATS_HEADER)
    print(stats.csv_row())


def _cmd_bench(args) -> None:
    from .lacore.bench import format_timings_csv, run_kernel_benchmark
    from .lacore.mmio import read_matrix_market
    from .phases import write_schedule_csv

    if (args.size is None) == (args.matrix is None):
        raise UsageError("bench: give exactly one of --size or --matrix")
    matrix = read_matrix_market(args.matrix) if args.matrix else None
    result = run_kernel_benchmark(
        args.kernel, size=args.size, matrix=matrix, repetitions=args.reps, seed=args.seed,
        workers=args.workers,
    )
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    write_schedule_csv(result.schedule, out / "schedule.csv")
    atomic_write_text(out / "timings.csv", format_timings_csv(result))
    print(f"{result.kernel},{result.n},{result.kernel_time_s:.9f}")


def _cmd_simulate(args) -> None:
    from .phases import read_schedule_csv, write_schedule_csv
    from .powersim import read_model_spec, simulate_trace, with_seed
    from .tracekit.steps import write_step_csv
    from .tracekit.trace import write_trace

    spec = read_model_spec(args.model)
    if args.seed is not None:
        spec = with_seed(spec, args.seed)
    schedule = read_schedule_csv(args.schedule)
    if args.hold is not None:
        schedule = schedule.held(args.hold)
    trace, truth = simulate_trace(spec, schedule)
    out = Path(args.output)
    write_trace(trace, out)
    write_step_csv(truth, Path(args.truth) if args.truth else out.with_suffix(".truth.csv"))
    if args.schedule_out:
        write_schedule_csv(schedule, args.schedule_out)


def _cmd_analyze(args) -> None:
    from .phases import read_schedule_csv
    from .tracekit import DetectParams, analyze_trace, combine_channels, estimate_noise, read_trace
    from .tracekit.steps import write_phase_reports_csv, write_step_csv

    noise = estimate_noise(combine_channels(read_trace(args.noise_sample)))
    params = DetectParams(window=args.window, k=args.k)
    schedule = read_schedule_csv(args.schedule) if args.schedule else None
    result = analyze_trace(read_trace(args.trace), noise, params, schedule, args.filter_window)
    out = Path(args.output)
    write_step_csv(result.model, out)
    if result.phases is not None:
        phases_out = Path(args.phases_out) if args.phases_out else out.with_suffix(".phases.csv")
        write_phase_reports_csv(result.phases, phases_out)
    print(f"{len(result.model)} steps, sigma_w={noise.sigma_w:.6g}")


def _cmd_campaign(args) -> None:
    from .campaign import read_campaign_config, run_campaign

    config = read_campaign_config(args.config)
    output = args.output or config.output
    if output is None:
        raise UsageError("campaign: no output path (use -o or set output in [campaign])")
    report = run_campaign(config, output)
    failed = sum(1 for r in report.rows if r.status == "failed")
    print(f"{len(report.rows)} experiments, {failed} failed -> {output}")


def _cmd_report(args) -> None:
    from .campaign import emit_plot_data, read_report_csv

    for path in emit_plot_data(read_report_csv(args.input), args.plots):
        print(path)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="greenbench", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen-matrix", help="generate a Q1 gravity matrix and load vector")
    g.add_argument("--nx", type=int, required=True, help="elements along x")
    g.add_argument("--ny", type=int, required=True, help="elements along y")
    g.add_argument("--nz", type=int, required=True, help="elements along z")
    g.add_argument("--lx", type=float, default=200.0, help="box length along x in km (default 200)")
    g.add_argument("--ly", type=float, default=200.0, help="box length along y in km (default 200)")
    g.add_argument("--lz", type=float, default=10.0, help="box depth in km (default 10)")
    g.add_argument("--drho", type=float, default=-300.0, help="density anomaly in kg/m^3 (default -300)")
    g.add_argument("-o", "--output", required=True, help="Matrix Market output path")
    g.add_argument("--rhs", help="load vector path (default: <output stem>.rhs.txt)")
    g.set_defaults(func=_cmd_gen_matrix)

    s = sub.add_parser("stats", help="print h,nz,density,bandwidth,max_row,mean_row,row_stddev")
    s.add_argument("-i", "--input", required=True, help="Matrix Market file")
    s.add_argument("--header", action="store_true", help="print a header line first")
    s.set_defaults(func=_cmd_stats)

    b = sub.add_parser("bench", help="time a kernel and write its phase schedule")
    b.add_argument("--kernel", required=True, choices=("axpy", "ewmul", "dot", "spmv", "cg"))
    b.add_argument("--size", type=int, help="vector length (or target matrix order for spmv/cg)")
    b.add_argument("--matrix", help="Matrix Market file for spmv/cg")
    b.add_argument("--reps", type=int, default=5, help="kernel repetitions (default 5)")
    b.add_argument("--seed", type=int, default=0, help="operand seed (default 0)")
    b.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
    b.add_argument("-o", "--output", required=True, help="directory for schedule.csv and timings.csv")
    b.set_defaults(func=_cmd_bench)

    m = sub.add_parser("simulate", help="synthesize a power trace for a phase schedule")
    m.add_argument("--model", required=True, help="power model file ([model] and [levels] sections)")
    m.add_argument("--schedule", required=True, help="phase schedule CSV")
    m.add_argument("--seed", type=int, help="override the model's rng_seed")
    m.add_argument("--hold", type=float, help="hold every phase at least this many seconds")
    m.add_argument("-o", "--output", required=True, help="trace file to write")
    m.add_argument("--truth", help="ground-truth step CSV (default: <output stem>.truth.csv)")
    m.add_argument("--schedule-out", help="write the schedule actually simulated (after --hold)")
    m.set_defaults(func=_cmd_simulate)

    a = sub.add_parser("analyze", help="detect steps in a trace and report per-phase energy")
    a.add_argument("--trace", required=True, help="trace file")
    a.add_argument("--noise-sample", required=True, help="idle trace used to estimate sensor noise")
    a.add_argument("--window", type=int, default=50, help="detector window in samples (default 50)")
    a.add_argument("--k", type=float, default=6.0, help="detection threshold in noise units (default 6)")
    a.add_argument("--filter-window", type=int, default=1, help="moving-average window, odd (default 1: off)")
    a.add_argument("--schedule", help="phase schedule CSV for per-phase reports")
    a.add_argument("-o", "--output", required=True, help="step model CSV to write")
    a.add_argument("--phases-out", help="phase report CSV (default: <output stem>.phases.csv)")
    a.set_defaults(func=_cmd_analyze)

    c = sub.add_parser("campaign", help="run a campaign config and write the report CSV")
    c.add_argument("--config", required=True, help="campaign INI file")
    c.add_argument("-o", "--output", help="report CSV (overrides output in the config)")
    c.set_defaults(func=_cmd_campaign)

    r = sub.add_parser("report", help="emit plot data from a report CSV")
    r.add_argument("--in", dest="input", required=True, help="report CSV")
    r.add_argument("--plots", required=True, help="directory for <family>_{time,energy}.csv")
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, OSError, KeyError, MemoryError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
