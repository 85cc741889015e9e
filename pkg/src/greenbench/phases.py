"""Named execution phases linking kernel runs to trace segments.

A benchmark run is laid out as ``idle, alloc_copy, kernel, copy_back, idle``.
The schedule CSV has header ``phase,start_s,end_s`` with seconds written
with nine fractional digits.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ._io import atomic_write_text, fmt_float

BENCH_PHASES = ("idle", "alloc_copy", "kernel", "copy_back", "idle")
SCHEDULE_HEADER = ("phase", "start_s", "end_s")


@dataclass(frozen=True)
class Phase:
    name: str
    start_s: float
    end_s: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class PhaseSchedule:
    """Ordered, non-overlapping phases with strictly increasing boundaries."""

    phases: tuple[Phase, ...]

    def __post_init__(self):
        phases = tuple(self.phases)
        object.__setattr__(self, "phases", phases)
        if not phases:
            raise ValueError("schedule needs at least one phase")
        prev_end = -math.inf
        for ph in phases:
            if not ph.name or "," in ph.name:
                raise ValueError(f"invalid phase name {ph.name!r}")
            if not (math.isfinite(ph.start_s) and math.isfinite(ph.end_s)):
                raise ValueError("phase boundaries must be finite")
            if not ph.end_s > ph.start_s:
                raise ValueError(f"phase {ph.name!r} has non-positive duration")
            if ph.start_s < prev_end:
                raise ValueError(f"phase {ph.name!r} overlaps its predecessor")
            prev_end = ph.end_s

    @classmethod
    def from_durations(cls, items: Iterable[tuple[str, float]], start_s: float = 0.0) -> PhaseSchedule:
        phases = []
        t = start_s
        for name, duration in items:
            phases.append(Phase(name, t, t + duration))
            t += duration
        return cls(tuple(phases))

    def __len__(self) -> int:
        return len(self.phases)

    def __iter__(self):
        return iter(self.phases)

    def __getitem__(self, i) -> Phase:
        return self.phases[i]

    @property
    def start_s(self) -> float:
        return self.phases[0].start_s

    @property
    def end_s(self) -> float:
        return self.phases[-1].end_s

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.phases)

    def is_contiguous(self, tol: float = 1e-12) -> bool:
        return all(
            abs(b.start_s - a.end_s) <= tol * max(1.0, abs(a.end_s))
            for a, b in zip(self.phases, self.phases[1:])
        )

    def find(self, name: str) -> Phase:
        """First phase called ``name``."""
        for ph in self.phases:
            if ph.name == name:
                return ph
        raise KeyError(name)

    def held(self, min_phase_s: float, start_s: float = 0.0) -> PhaseSchedule:
        """Contiguous copy where every phase lasts at least ``min_phase_s``.

        Kernels run for micro- to milliseconds, far below what a 1 kHz
        acquisition resolves; the bench rig holds each phase long enough to
        be seen, and this is the schedule a trace is simulated against.
        """
        return PhaseSchedule.from_durations(
            ((p.name, max(p.duration_s, min_phase_s)) for p in self.phases), start_s
        )


def mean_schedule(schedules: Sequence[PhaseSchedule]) -> PhaseSchedule:
    """Boundary-wise mean of schedules sharing the same phase names."""
    if not schedules:
        raise ValueError("no schedules to average")
    names = schedules[0].names
    for s in schedules[1:]:
        if s.names != names:
            raise ValueError("schedules have different phase layouts")
    k = len(schedules)
    phases = []
    for i, name in enumerate(names):
        start = math.fsum(s[i].start_s for s in schedules) / k
        end = math.fsum(s[i].end_s for s in schedules) / k
        phases.append(Phase(name, start, end))
    return PhaseSchedule(tuple(phases))


def format_schedule_csv(schedule: PhaseSchedule) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SCHEDULE_HEADER)
    for ph in schedule:
        writer.writerow((ph.name, fmt_float(ph.start_s), fmt_float(ph.end_s)))
    return out.getvalue()


def write_schedule_csv(schedule: PhaseSchedule, path) -> None:
    atomic_write_text(path, format_schedule_csv(schedule))


def parse_schedule_csv(text: str) -> PhaseSchedule:
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows or tuple(c.strip() for c in rows[0]) != SCHEDULE_HEADER:
        raise ValueError("schedule CSV must start with header phase,start_s,end_s")
    phases = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"schedule line {lineno}: expected 3 fields, got {len(row)}")
        try:
            phases.append(Phase(row[0].strip(), float(row[1]), float(row[2])))
        except ValueError as exc:
            raise ValueError(f"schedule line {lineno}: {exc}") from None
    return PhaseSchedule(tuple(phases))


def read_schedule_csv(path) -> PhaseSchedule:
    with open(path, encoding="utf-8") as fh:
        return parse_schedule_csv(fh.read())
