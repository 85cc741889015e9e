import subprocess
import sys

import pytest

from conftest import WORKED_DENSE
from greenbench.cli import build_parser, main
from greenbench.lacore import csr_from_dense
from greenbench.lacore.mmio import write_matrix_market
from greenbench.phases import PhaseSchedule, write_schedule_csv

SUBCOMMANDS = ("gen-matrix", "stats", "bench", "simulate", "analyze", "campaign", "report")


@pytest.fixture
def work(tmp_path):
    write_matrix_market(csr_from_dense(WORKED_DENSE), tmp_path / "m.mtx")
    write_schedule_csv(
        PhaseSchedule.from_durations([("idle", 1.0), ("kernel", 2.0), ("idle", 1.0)]), tmp_path / "s.csv"
    )
    (tmp_path / "model.ini").write_text("[model]\nidle_w = 30\nnoise_sigma_w = 2\n[levels]\nkernel = 150\n")
    (tmp_path / "quiet.ini").write_text("[model]\nidle_w = 30\nnoise_sigma_w = 0\n[levels]\nkernel = 150\n")
    idle = PhaseSchedule.from_durations([("idle", 1.0)])
    write_schedule_csv(idle, tmp_path / "idle.csv")
    return tmp_path


def run(*argv):
    return main([str(a) for a in argv])


def test_stats_worked_example(work, capsys):
    assert run("stats", "-i", work / "m.mtx") == 0
    assert capsys.readouterr().out == "5,11,0.44,2,3,2.2,0.4\n"
    assert run("stats", "-i", work / "m.mtx", "--header") == 0
    assert capsys.readouterr().out.splitlines()[0] == "h,nz,density,bandwidth,max_row,mean_row,row_stddev"


def test_gen_matrix(work, capsys):
    out = work / "g.mtx"
    assert run("gen-matrix", "--nx", 4, "--ny", 4, "--nz", 3, "-o", out) == 0
    assert out.exists() and (work / "g.rhs.txt").exists()
    first = out.read_bytes()
    assert run("gen-matrix", "--nx", 4, "--ny", 4, "--nz", 3, "-o", out) == 0
    assert out.read_bytes() == first
    assert run("stats", "-i", out) == 0
    assert capsys.readouterr().out.startswith("18,")


def test_bench(work, capsys):
    assert run("bench", "--kernel", "dot", "--size", 1000, "--reps", 2, "-o", work / "b") == 0
    assert (work / "b" / "schedule.csv").read_text().startswith("phase,start_s,end_s\n")
    assert (work / "b" / "timings.csv").exists()
    assert run("bench", "--kernel", "spmv", "--matrix", work / "m.mtx", "-o", work / "b2") == 0
    assert capsys.readouterr().out.splitlines()[-1].startswith("spmv,5,")


def test_simulate_then_analyze_zero_noise(work):
    assert run("simulate", "--model", work / "quiet.ini", "--schedule", work / "s.csv", "-o", work / "q.trace") == 0
    assert run("simulate", "--model", work / "model.ini", "--schedule", work / "idle.csv", "-o", work / "n.trace") == 0
    assert run("analyze", "--trace", work / "q.trace", "--noise-sample", work / "n.trace", "-o", work / "steps.csv") == 0
    assert (work / "steps.csv").read_text() == (work / "q.truth.csv").read_text()


def test_analyze_three_steps_with_phases(work):
    run("simulate", "--model", work / "model.ini", "--schedule", work / "s.csv", "--seed", 4, "-o", work / "t.trace")
    run("simulate", "--model", work / "model.ini", "--schedule", work / "idle.csv", "--seed", 5, "-o", work / "n.trace")
    rc = run("analyze", "--trace", work / "t.trace", "--noise-sample", work / "n.trace",
             "--schedule", work / "s.csv", "-o", work / "steps.csv")
    assert rc == 0
    assert len((work / "steps.csv").read_text().splitlines()) == 4
    phases = (work / "steps.phases.csv").read_text().splitlines()
    assert phases[0] == "phase,duration_s,mean_power_w,energy_j"
    assert [p.split(",")[0] for p in phases[1:]] == ["idle", "kernel", "idle"]


def test_campaign_and_report(work):
    (work / "c.ini").write_text("[campaign]\nseed = 2\n[experiment dot:1k]\nkernel = dot\nsize = 1000\nrepetitions = 2\n")
    assert run("campaign", "--config", work / "c.ini", "-o", work / "r.csv") == 0
    first = (work / "r.csv").read_bytes()
    assert run("campaign", "--config", work / "c.ini", "-o", work / "r.csv") == 0
    assert (work / "r.csv").read_bytes() == first
    assert run("report", "--in", work / "r.csv", "--plots", work / "plots") == 0
    assert (work / "plots" / "dot_time.csv").exists()
    assert (work / "plots" / "dot_energy.csv").exists()


def test_simulate_idempotent(work):
    for name in ("a", "b"):
        run("simulate", "--model", work / "model.ini", "--schedule", work / "s.csv", "--seed", 1, "-o", work / f"{name}.trace")
    assert (work / "a.trace").read_bytes() == (work / "b.trace").read_bytes()
    assert (work / "a.truth.csv").read_bytes() == (work / "b.truth.csv").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["stats"],
        ["stats", "-i", "x.mtx", "--bogus"],
        ["bench", "--kernel", "dot", "-o", "d"],
        ["bench", "--kernel", "fft", "--size", "3", "-o", "d"],
        ["gen-matrix", "--nx", "two", "--ny", "2", "--nz", "2", "-o", "x"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("error:") and err.count("\n") == 1


def test_data_errors_exit_2(work, capsys):
    assert run("stats", "-i", work / "missing.mtx") == 2
    (work / "bad.mtx").write_text("not a matrix\n")
    assert run("stats", "-i", work / "bad.mtx") == 2
    assert run("gen-matrix", "--nx", 1, "--ny", 4, "--nz", 4, "-o", work / "x.mtx") == 2
    (work / "bad.trace").write_text("# sample_period_s: 0.001\n1,2\n")
    assert run("analyze", "--trace", work / "bad.trace", "--noise-sample", work / "bad.trace", "-o", work / "o.csv") == 2
    (work / "bad.ini").write_text("[campaign]\n")
    assert run("campaign", "--config", work / "bad.ini", "-o", work / "r.csv") == 2
    for line in capsys.readouterr().err.splitlines():
        assert line.startswith("error:")


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_exits_0_and_lists_flags(sub, capsys):
    assert main([sub, "--help"]) == 0
    text = capsys.readouterr().out
    sp = build_parser()._subparsers._group_actions[0].choices[sub]
    for action in sp._actions:
        for opt in action.option_strings:
            assert opt in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "greenbench", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in SUBCOMMANDS:
        assert sub in proc.stdout


def test_simulate_writes_held_schedule(work):
    rc = run("simulate", "--model", work / "model.ini", "--schedule", work / "s.csv", "--hold", 1.5,
             "-o", work / "h.trace", "--schedule-out", work / "held.csv")
    assert rc == 0
    lines = (work / "held.csv").read_text().splitlines()
    assert lines[1:] == ["idle,0.000000000,1.500000000", "kernel,1.500000000,3.500000000", "idle,3.500000000,5.000000000"]
