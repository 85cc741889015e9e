"""Campaign reports and plot data as CSV."""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .._io import atomic_write_text
from .config import family_of

REPORT_HEADER = ("experiment", "n", "time_s", "power_w", "energy_j", "pattern_support")
STATUS_HEADER = ("experiment", "repetitions", "failed", "status")
PLOT_HEADER = ("n", "value")


@dataclass
class ReportRow:
    experiment: str
    n: int
    time_s: float
    power_w: float
    energy_j: float
    pattern_support: int
    repetitions: int = 0
    failed: int = 0
    status: str = "ok"

    @property
    def family(self) -> str:
        return family_of(self.experiment)


@dataclass
class CampaignReport:
    rows: list[ReportRow] = field(default_factory=list)


def _num(v: float) -> str:
    return "nan" if math.isnan(v) else repr(float(v))


def format_report_csv(report: CampaignReport) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in report.rows:
        w.writerow((r.experiment, r.n, _num(r.time_s), _num(r.power_w), _num(r.energy_j), r.pattern_support))
    return out.getvalue()


def format_status_csv(report: CampaignReport) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(STATUS_HEADER)
    for r in report.rows:
        w.writerow((r.experiment, r.repetitions, r.failed, r.status))
    return out.getvalue()


def status_path(report_path) -> Path:
    p = Path(report_path)
    return p.with_name(p.stem + ".status.csv")


def emit_report(report: CampaignReport, path) -> None:
    """Write the report CSV and, beside it, the per-experiment status CSV."""
    if not report.rows:
        raise ValueError("report is empty")
    atomic_write_text(path, format_report_csv(report))
    atomic_write_text(status_path(path), format_status_csv(report))


def parse_report_csv(text: str) -> CampaignReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != REPORT_HEADER:
        raise ValueError("report CSV must start with header " + ",".join(REPORT_HEADER))
    report = CampaignReport()
    for lineno, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        if len(r) != len(REPORT_HEADER):
            raise ValueError(f"report line {lineno}: expected {len(REPORT_HEADER)} fields")
        report.rows.append(
            ReportRow(r[0], int(r[1]), float(r[2]), float(r[3]), float(r[4]), int(r[5]))
        )
    return report


def read_report_csv(path) -> CampaignReport:
    with open(path, encoding="utf-8") as fh:
        return parse_report_csv(fh.read())


def emit_plot_data(report: CampaignReport, directory) -> list[Path]:
    """Per family, ``<family>_time.csv`` and ``<family>_energy.csv`` with header ``n,value``.

    Rows of failed experiments (NaN measurements) are left out.
    """
    if not report.rows:
        raise ValueError("report is empty")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    families: dict[str, list[ReportRow]] = {}
    for r in report.rows:
        families.setdefault(r.family, []).append(r)
    written = []
    for fam, rows in families.items():
        for metric in ("time", "energy"):
            out = io.StringIO()
            w = csv.writer(out, lineterminator="\n")
            w.writerow(PLOT_HEADER)
            for r in rows:
                value = r.time_s if metric == "time" else r.energy_j
                if not math.isnan(value):
                    w.writerow((r.n, _num(value)))
            path = directory / f"{re.sub(r'[^A-Za-z0-9_.-]', '_', fam)}_{metric}.csv"
            atomic_write_text(path, out.getvalue())
            written.append(path)
    return written
