"""Multi-channel oscilloscope traces and the watts series derived from them.

Trace file format (UTF-8 text)::

    # sample_period_s: 0.001
    # supply_volts: 12.0
    # gains_a_per_v: 10.0,10.0
    # t0_s: 0.0                 (optional, default 0)
    # time_column: true         (optional; first column is time in seconds)
    0.25,0.125
    0.25,0.125
    ...

Any other line starting with ``#`` is a comment. One row per sample, one
comma-separated column of volts per channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._io import atomic_write_text
from ..errors import TraceFormatError

TIME_JITTER_S = 1e-9
REQUIRED_HEADERS = ("sample_period_s", "supply_volts", "gains_a_per_v")


def _frozen_array(values) -> np.ndarray:
    a = np.array(values, dtype=np.float64).reshape(-1)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Channel:
    gain: float  # amperes per volt
    samples: np.ndarray  # volts

    def __post_init__(self):
        gain = float(self.gain)
        if not (math.isfinite(gain) and gain > 0):
            raise ValueError("channel gain must be finite and positive")
        samples = _frozen_array(self.samples)
        if not np.all(np.isfinite(samples)):
            raise ValueError("channel samples must be finite")
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "samples", samples)


@dataclass(frozen=True, eq=False)
class PowerTrace:
    sample_period: float
    channels: tuple[Channel, ...]
    supply_volts: float = 12.0
    t0: float = 0.0

    def __post_init__(self):
        channels = tuple(self.channels)
        if not channels:
            raise ValueError("a trace needs at least one channel")
        lengths = {c.samples.size for c in channels}
        if len(lengths) != 1:
            raise ValueError(f"channels have different lengths: {sorted(lengths)}")
        if lengths.pop() < 2:
            raise ValueError("a trace needs at least two samples")
        dt = float(self.sample_period)
        if not (math.isfinite(dt) and dt > 0):
            raise ValueError("sample_period must be finite and positive")
        supply = float(self.supply_volts)
        if not (math.isfinite(supply) and supply > 0):
            raise ValueError("supply_volts must be finite and positive")
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        object.__setattr__(self, "channels", channels)
        object.__setattr__(self, "sample_period", dt)
        object.__setattr__(self, "supply_volts", supply)
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n_samples(self) -> int:
        return self.channels[0].samples.size

    @property
    def gains(self) -> tuple[float, ...]:
        return tuple(c.gain for c in self.channels)

    def volts(self) -> np.ndarray:
        """Samples as an ``(n_samples, n_channels)`` array."""
        return np.column_stack([c.samples for c in self.channels])

    def __eq__(self, other):
        if not isinstance(other, PowerTrace):
            return NotImplemented
        return (
            self.sample_period == other.sample_period
            and self.supply_volts == other.supply_volts
            and self.t0 == other.t0
            and self.gains == other.gains
            and all(np.array_equal(a.samples, b.samples) for a, b in zip(self.channels, other.channels))
        )


@dataclass(frozen=True, eq=False)
class PowerSeries:
    sample_period: float
    t0: float
    watts: np.ndarray

    def __post_init__(self):
        dt = float(self.sample_period)
        if not (math.isfinite(dt) and dt > 0):
            raise ValueError("sample_period must be finite and positive")
        watts = _frozen_array(self.watts)
        if watts.size < 2:
            raise ValueError("a power series needs at least two samples")
        if not np.all(np.isfinite(watts)):
            raise ValueError("power samples must be finite")
        object.__setattr__(self, "sample_period", dt)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "watts", watts)

    def __len__(self) -> int:
        return self.watts.size

    @property
    def end_s(self) -> float:
        return self.t0 + self.watts.size * self.sample_period

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.watts.size) * self.sample_period

    def with_watts(self, watts) -> PowerSeries:
        return PowerSeries(self.sample_period, self.t0, watts)


def combine_channels(trace: PowerTrace) -> PowerSeries:
    """``watts[t] = supply_volts * sum_ch gain_ch * volts_ch[t]``."""
    current = trace.channels[0].gain * trace.channels[0].samples
    for ch in trace.channels[1:]:
        current = current + ch.gain * ch.samples
    return PowerSeries(trace.sample_period, trace.t0, trace.supply_volts * current)


def _parse_float(key: str, value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise TraceFormatError(f"header {key!r}: not a number: {value!r}") from None
    if not math.isfinite(v):
        raise TraceFormatError(f"header {key!r}: value must be finite")
    return v


def parse_trace(text: str) -> PowerTrace:
    headers: dict[str, str] = {}
    rows: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, sep, value = body.partition(":")
            key = key.strip()
            if sep and key in REQUIRED_HEADERS + ("t0_s", "time_column"):
                if key in headers:
                    raise TraceFormatError(f"line {lineno}: duplicate header {key!r}")
                if rows:
                    raise TraceFormatError(f"line {lineno}: header {key!r} after data rows")
                headers[key] = value.strip()
            continue
        rows.append([c.strip() for c in line.split(",")])

    missing = [k for k in REQUIRED_HEADERS if k not in headers]
    if missing:
        raise TraceFormatError(f"missing header(s): {', '.join(missing)}")
    dt = _parse_float("sample_period_s", headers["sample_period_s"])
    if dt <= 0:
        raise TraceFormatError("sample_period_s must be positive")
    supply = _parse_float("supply_volts", headers["supply_volts"])
    if supply <= 0:
        raise TraceFormatError("supply_volts must be positive")
    gain_fields = [g.strip() for g in headers["gains_a_per_v"].split(",")]
    gains = [_parse_float("gains_a_per_v", g) for g in gain_fields]
    if any(g <= 0 for g in gains):
        raise TraceFormatError("gains must be positive")
    t0 = _parse_float("t0_s", headers["t0_s"]) if "t0_s" in headers else 0.0
    time_flag = headers.get("time_column", "false").lower()
    if time_flag not in ("true", "false", "yes", "no", "1", "0"):
        raise TraceFormatError(f"header 'time_column': expected a boolean, got {time_flag!r}")
    has_time = time_flag in ("true", "yes", "1")

    width = len(gains) + (1 if has_time else 0)
    for i, row in enumerate(rows):
        if len(row) != width or any(c == "" for c in row):
            raise TraceFormatError(
                f"ragged row {i + 1}: expected {width} values, got {sum(1 for c in row if c)}"
            )
    if len(rows) < 2:
        raise TraceFormatError("a trace needs at least two sample rows")
    try:
        data = np.array([[float(c) for c in row] for row in rows], dtype=np.float64)
    except ValueError as exc:
        raise TraceFormatError(f"bad sample value: {exc}") from None
    if not np.all(np.isfinite(data)):
        raise TraceFormatError("sample values must be finite")

    if has_time:
        times = data[:, 0]
        data = data[:, 1:]
        if np.any(np.diff(times) <= 0):
            raise TraceFormatError("time column is not strictly increasing")
        expected = times[0] + np.arange(times.size) * dt
        if np.max(np.abs(times - expected)) > TIME_JITTER_S:
            raise TraceFormatError("time column is not uniform at the declared sample period")
        t0 = float(times[0])

    channels = tuple(Channel(g, data[:, j]) for j, g in enumerate(gains))
    return PowerTrace(dt, channels, supply, t0)


def serialize_trace(trace: PowerTrace) -> str:
    """Canonical text form; ``parse_trace`` inverts it exactly."""
    lines = [
        f"# sample_period_s: {trace.sample_period!r}",
        f"# supply_volts: {trace.supply_volts!r}",
        "# gains_a_per_v: " + ",".join(repr(g) for g in trace.gains),
        f"# t0_s: {trace.t0!r}",
    ]
    volts = trace.volts().tolist()
    lines.extend(",".join(repr(v) for v in row) for row in volts)
    return "\n".join(lines) + "\n"


def normalize_trace_text(text: str) -> str:
    return serialize_trace(parse_trace(text))


def read_trace(path) -> PowerTrace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read())


def write_trace(trace: PowerTrace, path) -> None:
    atomic_write_text(path, serialize_trace(trace))
