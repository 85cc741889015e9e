import math

import pytest

from greenbench.campaign import (
    emit_plot_data,
    emit_report,
    parse_campaign_config,
    read_campaign_config,
    read_report_csv,
    run_campaign,
    run_experiment,
)
from greenbench.campaign.runner import CALIBRATION_STREAM, _modeled_schedule
from greenbench.errors import ConfigError
from greenbench.lacore.bench import modeled_kernel_time, run_kernel_benchmark
from greenbench.phases import PhaseSchedule
from greenbench.powersim import calibration_trace, kernel_model, simulate_trace, with_seed
from greenbench.tracekit import analyze_trace, combine_channels, estimate_noise
from greenbench.tracekit.steps import segment_phases
from greenbench.tracekit.trace import write_trace


def config(body, campaign="seed = 1\n", base="."):
    return parse_campaign_config(f"[campaign]\n{campaign}\n{body}", base)


def test_zero_noise_exact():
    cfg = config("[experiment cg:small]\nkernel = cg\ngrid = 6,6,6\nrepetitions = 3\nnoise_sigma_w = 0\n")
    res = run_experiment(cfg.experiments[0], cfg, 0)
    assert res.row.pattern_support == 3
    assert res.row.power_w == 120.0
    assert res.row.energy_j == pytest.approx(120.0 * res.row.time_s, rel=1e-15)
    assert res.row.status == "ok"
    assert res.row.n == 125


@pytest.mark.parametrize("timing", ["model", "measured"])
def test_time_grows_with_size(timing):
    body = "".join(
        f"[experiment dot:{n}]\nkernel = dot\nsize = {n}\nrepetitions = 1\nbench_repetitions = 3\n"
        for n in (10_000, 2_000_000, 5_000_000)
    )
    report = run_campaign(config(body, f"timing = {timing}\n"))
    times = [r.time_s for r in report.rows]
    assert times[0] < times[1] < times[2]


def test_noisy_power_within_one_watt():
    cfg = config("[experiment spmv:a]\nkernel = spmv\ngrid = 8,8,8\nrepetitions = 10\n")
    row = run_experiment(cfg.experiments[0], cfg, 0).row
    assert row.pattern_support == 10
    assert abs(row.power_w - 150.0) < 1.0


def test_single_rep_matches_single_pipeline():
    cfg = config("[experiment dot:x]\nkernel = dot\nsize = 1000\nrepetitions = 1\n", "seed = 5\n")
    exp = cfg.experiments[0]
    row = run_experiment(exp, cfg, 0).row

    noise = estimate_noise(combine_channels(calibration_trace(with_seed(exp.model, [5, 0, CALIBRATION_STREAM]))))
    bench = run_kernel_benchmark("dot", size=1000, repetitions=5, seed=[5, 0, 0])
    t = modeled_kernel_time("dot", bench.n, 0, 0)
    sched = _modeled_schedule(bench, cfg, t).held(cfg.min_phase_s)
    trace, _ = simulate_trace(with_seed(exp.model, [5, 0, 0, 0]), sched)
    model = analyze_trace(trace, noise).model
    kernel = next(r for r in segment_phases(model, sched) if r.phase == "kernel")
    assert row.power_w == kernel.mean_power_w
    assert row.time_s == t


def test_spike_reps_excluded():
    cfg = config("[experiment dot:s]\nkernel = dot\nsize = 1e4\nrepetitions = 10\nspike_reps = 2,7\n")
    res = run_experiment(cfg.experiments[0], cfg, 0)
    assert res.groups == [[0, 1, 3, 4, 5, 6, 8, 9], [2, 7]]
    assert res.row.pattern_support == 8
    assert abs(res.row.power_w - 55.0) < 0.5


def test_stuck_draws_recover_within_budget():
    cfg = config("[experiment dot:r]\nkernel = dot\nsize = 1e4\nrepetitions = 2\nstuck_draws = 2\n")
    res = run_experiment(cfg.experiments[0], cfg, 0)
    assert all(a.draws == 3 for a in res.acquisitions)
    assert res.row.status == "ok"


def test_stuck_beyond_budget_fails_row():
    cfg = config(
        "[experiment dot:bad]\nkernel = dot\nsize = 1e4\nrepetitions = 2\nstuck_draws = 5\n"
        "[experiment dot:good]\nkernel = dot\nsize = 1e4\n",
        "max_rewaits = 1\n",
    )
    report = run_campaign(cfg)
    bad, good = report.rows
    assert bad.status == "failed" and bad.failed == 2 and bad.pattern_support == 0
    assert math.isnan(bad.power_w) and math.isnan(bad.time_s)
    assert good.status == "ok"


def _external_setup(tmp_path, tail_w=None):
    """One recorded trace; with ``tail_w`` the last phase never returns to idle."""
    names = ["idle", "alloc_copy", "kernel", "copy_back", "idle" if tail_w is None else "stuck"]
    sched = PhaseSchedule.from_durations((n, 0.5) for n in names)
    spec = kernel_model("dot", phase_levels={"stuck": tail_w or 0.0})
    d = tmp_path / "traces"
    d.mkdir()
    write_trace(simulate_trace(spec, sched)[0], d / "rep_000.trace")
    write_trace(calibration_trace(spec), tmp_path / "noise.trace")
    (tmp_path / "c.ini").write_text(
        "[campaign]\noutput = out.csv\n[experiment dot:ext]\nkernel = dot\nsize = 1000\n"
        "trace_dir = traces\nnoise_trace = noise.trace\n"
    )
    return read_campaign_config(tmp_path / "c.ini")


def test_external_trace_ok(tmp_path):
    cfg = _external_setup(tmp_path)
    report = run_campaign(cfg)
    assert report.rows[0].status == "ok"
    assert (tmp_path / "out.csv").exists()


def test_external_trace_not_back_to_idle(tmp_path):
    cfg = _external_setup(tmp_path, 55.0)
    assert run_campaign(cfg).rows[0].status == "failed"


def test_missing_external_trace(tmp_path):
    cfg = _external_setup(tmp_path)
    (tmp_path / "traces" / "rep_000.trace").unlink()
    with pytest.raises(FileNotFoundError):
        run_campaign(cfg)


def test_emit_report_and_plots(tmp_path):
    body = "".join(f"[experiment dot:{n}]\nkernel = dot\nsize = {n}\n" for n in (1000, 2000, 3000))
    body += "[experiment cg:a]\nkernel = cg\ngrid = 5,5,5\n"
    report = run_campaign(config(body))
    out = tmp_path / "r.csv"
    emit_report(report, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "experiment,n,time_s,power_w,energy_j,pattern_support"
    assert len(lines) == 5
    assert (tmp_path / "r.status.csv").read_text().splitlines()[0] == "experiment,repetitions,failed,status"
    back = read_report_csv(out)
    assert [r.experiment for r in back.rows] == [r.experiment for r in report.rows]
    assert back.rows[0].energy_j == report.rows[0].energy_j

    paths = emit_plot_data(back, tmp_path / "plots")
    names = sorted(p.name for p in paths)
    assert names == ["cg_energy.csv", "cg_time.csv", "dot_energy.csv", "dot_time.csv"]
    dot_time = (tmp_path / "plots" / "dot_time.csv").read_text().splitlines()
    assert dot_time[0] == "n,value" and len(dot_time) == 4

    first = out.read_bytes()
    emit_report(read_report_csv(out), out)
    assert out.read_bytes() == first


def test_campaign_deterministic(tmp_path):
    body = "[experiment spmv:a]\nkernel = spmv\ngrid = 6,6,6\nrepetitions = 4\nspike_reps = 1\n"
    run_campaign(config(body), tmp_path / "a.csv")
    run_campaign(config(body), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize(
    "text",
    [
        "[campaign]\n",
        "[experiment a]\nkernel = fft\nsize = 10\n",
        "[experiment a]\nkernel = dot\n",
        "[experiment a]\nkernel = dot\nsize = 10\ncolour = red\n",
        "[campaign]\ntiming = guess\n[experiment a]\nkernel = dot\nsize = 10\n",
        "[campaign]\nseed = x\n[experiment a]\nkernel = dot\nsize = 10\n",
        "[experiment a]\nkernel = dot\nsize = 10\nrepetitions = 2\nspike_reps = 5\n",
        "[experiment a]\nkernel = dot\nsize = 10\ntrace_dir = t\n",
        "[other]\nx = 1\n",
        "[experiment a]\nkernel = dot\nsize = 10\nrepetitions = 0\n",
        "not an ini file",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_campaign_config(text)


def test_config_paths_relative_to_file(tmp_path):
    (tmp_path / "c.ini").write_text("[campaign]\noutput = sub/r.csv\n[experiment a]\nkernel = spmv\nmatrix = m.mtx\n")
    cfg = read_campaign_config(tmp_path / "c.ini")
    assert cfg.output == tmp_path / "sub" / "r.csv"
    assert cfg.experiments[0].matrix == tmp_path / "m.mtx"
    assert cfg.experiments[0].family == "a"
