"""Synthetic two-clamp power traces with known ground truth.

Each sample's power is the level of the phase it falls in plus i.i.d.
Gaussian noise in watts. That power is split across two clamp channels and
converted to volts so that :func:`~greenbench.tracekit.combine_channels`
reproduces it.

Random numbers come from NumPy's PCG64 generator (``numpy.random.default_rng``)
seeded with ``rng_seed``, which may be an int or a sequence of ints (handed to
``SeedSequence``). The campaign runner seeds with
``(seed, experiment_index, repetition, draw)``. Statistical behaviour, not
the exact bit stream, is what tests rely on across platforms.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import ConfigError
from .phases import Phase, PhaseSchedule
from .tracekit.steps import Step, StepModel, render
from .tracekit.trace import Channel, PowerTrace

Seed = Union[int, Sequence[int]]

# kernel-phase levels in the range of measured GPU draw for these kernels
KERNEL_LEVELS_W = {"axpy": 50.0, "ewmul": 50.0, "dot": 55.0, "spmv": 150.0, "cg": 120.0}
TRANSFER_LEVEL_W = 45.0


@dataclass(frozen=True)
class PowerModelSpec:
    idle_w: float = 30.0
    phase_levels: Mapping[str, float] = field(default_factory=dict)
    noise_sigma_w: float = 2.0
    sample_period_s: float = 1e-3
    channel_split: float = 0.5
    gains: tuple[float, float] = (10.0, 10.0)
    supply_volts: float = 12.0
    rng_seed: Seed = 0

    def __post_init__(self):
        levels = dict(self.phase_levels)
        object.__setattr__(self, "phase_levels", levels)
        object.__setattr__(self, "gains", tuple(float(g) for g in self.gains))
        if not self.idle_w >= 0 or any(not v >= 0 for v in levels.values()):
            raise ConfigError("power levels must be >= 0")
        if not 0.0 <= self.channel_split <= 1.0:
            raise ConfigError("channel_split must lie in [0, 1]")
        if not (math.isfinite(self.sample_period_s) and self.sample_period_s > 0):
            raise ConfigError("sample_period_s must be positive")
        if not self.noise_sigma_w >= 0:
            raise ConfigError("noise_sigma_w must be >= 0")
        if len(self.gains) != 2 or any(not g > 0 for g in self.gains):
            raise ConfigError("gains must be two positive values")
        if not self.supply_volts > 0:
            raise ConfigError("supply_volts must be positive")

    def level(self, phase: str) -> float:
        if phase in self.phase_levels:
            return float(self.phase_levels[phase])
        if phase == "idle":
            return float(self.idle_w)
        raise ConfigError(f"no power level configured for phase {phase!r}")


def kernel_model(kernel: str, **overrides) -> PowerModelSpec:
    """Default levels for one benchmark run of ``kernel``."""
    levels = {
        "alloc_copy": TRANSFER_LEVEL_W,
        "kernel": KERNEL_LEVELS_W[kernel],
        "copy_back": TRANSFER_LEVEL_W,
    }
    levels.update(overrides.pop("phase_levels", {}))
    return PowerModelSpec(phase_levels=levels, **overrides)


def ground_truth_model(spec: PowerModelSpec, schedule: PhaseSchedule) -> StepModel:
    if not schedule.is_contiguous():
        raise ValueError("schedule has gaps between phases")
    steps = tuple(Step(ph.start_s, spec.level(ph.name)) for ph in schedule)
    return StepModel(steps, schedule.end_s)


def simulate_trace(spec: PowerModelSpec, schedule: PhaseSchedule) -> tuple[PowerTrace, StepModel]:
    """Noisy clamp-voltage trace for ``schedule`` and its noiseless step model."""
    truth = ground_truth_model(spec, schedule)
    dt = spec.sample_period_s
    n = int(round((schedule.end_s - schedule.start_s) / dt))
    if n < 2:
        raise ValueError("schedule is shorter than two samples")
    watts = render(truth, dt, n).watts.copy()
    rng = np.random.default_rng(spec.rng_seed)
    # always draw so the stream position does not depend on sigma
    watts += spec.noise_sigma_w * rng.standard_normal(n)
    split = (spec.channel_split, 1.0 - spec.channel_split)
    channels = tuple(
        Channel(g, watts * s / (spec.supply_volts * g)) for g, s in zip(spec.gains, split)
    )
    trace = PowerTrace(dt, channels, spec.supply_volts, schedule.start_s)
    return trace, truth


def calibration_trace(spec: PowerModelSpec, duration_s: float = 1.0) -> PowerTrace:
    """Idle-only capture used to estimate sensor noise."""
    schedule = PhaseSchedule((Phase("idle", 0.0, duration_s),))
    return simulate_trace(spec, schedule)[0]


def inject_spike(
    schedule: PhaseSchedule,
    within: str = "kernel",
    offset_frac: float = 0.4,
    duration_frac: float = 0.2,
    name: str = "spike",
) -> PhaseSchedule:
    """Split phase ``within`` and insert a ``name`` phase inside it.

    Models a disturbed acquisition: an extra segment the clean runs lack.
    """
    if not (0.0 < offset_frac and duration_frac > 0 and offset_frac + duration_frac < 1.0):
        raise ValueError("spike must sit strictly inside the phase")
    out = []
    done = False
    for ph in schedule:
        if ph.name == within and not done:
            a = ph.start_s + offset_frac * ph.duration_s
            b = a + duration_frac * ph.duration_s
            out += [Phase(ph.name, ph.start_s, a), Phase(name, a, b), Phase(ph.name, b, ph.end_s)]
            done = True
        else:
            out.append(ph)
    if not done:
        raise KeyError(within)
    return PhaseSchedule(tuple(out))


def with_seed(spec: PowerModelSpec, seed: Seed) -> PowerModelSpec:
    return replace(spec, rng_seed=seed)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]


def parse_model_spec(text: str) -> PowerModelSpec:
    """Read a model file::

        [model]
        idle_w = 30
        noise_sigma_w = 2
        sample_period_s = 0.001
        channel_split = 0.5
        gains_a_per_v = 10,10
        supply_volts = 12
        rng_seed = 0

        [levels]
        kernel = 150
    """
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"model file: {exc}") from None
    if not cp.has_section("model"):
        raise ConfigError("model file needs a [model] section")
    m = cp["model"]
    known = {"idle_w", "noise_sigma_w", "sample_period_s", "channel_split", "gains_a_per_v",
             "supply_volts", "rng_seed"}
    unknown = set(m) - known
    if unknown:
        raise ConfigError(f"unknown model keys: {', '.join(sorted(unknown))}")
    try:
        kwargs = dict(
            idle_w=m.getfloat("idle_w", 30.0),
            noise_sigma_w=m.getfloat("noise_sigma_w", 2.0),
            sample_period_s=m.getfloat("sample_period_s", 1e-3),
            channel_split=m.getfloat("channel_split", 0.5),
            gains=tuple(_floats(m.get("gains_a_per_v", "10,10"))),
            supply_volts=m.getfloat("supply_volts", 12.0),
            rng_seed=m.getint("rng_seed", 0),
        )
        levels = {k: float(v) for k, v in cp["levels"].items()} if cp.has_section("levels") else {}
    except ValueError as exc:
        raise ConfigError(f"model file: {exc}") from None
    return PowerModelSpec(phase_levels=levels, **kwargs)


def read_model_spec(path) -> PowerModelSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_model_spec(fh.read())
