"""Campaign configuration files.

INI syntax: one ``[campaign]`` section for global settings and one
``[experiment NAME]`` section per experiment, run in file order. Relative
paths are resolved against the config file's directory. ``docs/campaign.md``
lists every key.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..errors import ConfigError
from ..lacore.bench import KERNELS
from ..powersim import PowerModelSpec, kernel_model, read_model_spec
from ..tracekit.steps import DetectParams

TIMING_MODES = ("model", "measured")

_CAMPAIGN_KEYS = {
    "seed", "pattern_tolerance", "idle_tolerance_w", "output", "timing", "bandwidth_gbps",
    "min_phase_s", "max_rewaits", "window", "k", "filter_window", "calibration_s", "workers",
}
_EXPERIMENT_KEYS = {
    "kernel", "size", "grid", "matrix", "repetitions", "bench_repetitions", "model", "idle_w",
    "kernel_w", "alloc_copy_w", "copy_back_w", "noise_sigma_w", "sample_period_s",
    "channel_split", "gains_a_per_v", "supply_volts", "spike_reps", "spike_w", "stuck_draws",
    "trace_dir", "noise_trace",
}


@dataclass
class ExperimentConfig:
    name: str
    kernel: str
    repetitions: int = 1
    size: Optional[int] = None
    grid: Optional[tuple[int, int, int]] = None
    matrix: Optional[Path] = None
    bench_repetitions: int = 5
    model: Optional[PowerModelSpec] = None
    trace_dir: Optional[Path] = None
    noise_trace: Optional[Path] = None
    spike_reps: tuple[int, ...] = ()
    spike_w: float = 250.0
    stuck_draws: int = 0

    @property
    def family(self) -> str:
        return family_of(self.name)

    @property
    def simulated(self) -> bool:
        return self.trace_dir is None


@dataclass
class CampaignConfig:
    experiments: list[ExperimentConfig]
    pattern_tolerance: float = 0.02
    idle_tolerance_w: Optional[float] = None  # None: 3 * estimated noise sigma
    output: Optional[Path] = None
    seed: int = 0
    timing: str = "model"
    bandwidth_bytes_per_s: float = 10e9
    min_phase_s: float = 0.5
    max_rewaits: int = 3
    detect: DetectParams = field(default_factory=DetectParams)
    filter_window: int = 1
    calibration_s: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if not self.experiments:
            raise ConfigError("campaign has no experiments")
        if not self.pattern_tolerance > 0:
            raise ConfigError("pattern_tolerance must be > 0")
        if self.idle_tolerance_w is not None and not self.idle_tolerance_w > 0:
            raise ConfigError("idle_tolerance_w must be > 0")
        if self.timing not in TIMING_MODES:
            raise ConfigError(f"timing must be one of {TIMING_MODES}")
        if self.max_rewaits < 0:
            raise ConfigError("max_rewaits must be >= 0")
        if not self.min_phase_s > 0:
            raise ConfigError("min_phase_s must be > 0")
        names = [e.name for e in self.experiments]
        if len(set(names)) != len(names):
            raise ConfigError("experiment names must be unique")
        for e in self.experiments:
            if e.repetitions < 1:
                raise ConfigError(f"{e.name}: repetitions must be >= 1")


def family_of(name: str) -> str:
    """Experiment family: the name up to its first ``:``."""
    return name.split(":", 1)[0]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(";", ",").split(",") if t.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def _experiment(name: str, sec, base: Path) -> ExperimentConfig:
    unknown = set(sec) - _EXPERIMENT_KEYS
    if unknown:
        raise ConfigError(f"[experiment {name}]: unknown keys {', '.join(sorted(unknown))}")
    kernel = sec.get("kernel")
    if kernel not in KERNELS:
        raise ConfigError(f"[experiment {name}]: kernel must be one of {', '.join(KERNELS)}")
    exp = ExperimentConfig(name=name, kernel=kernel)
    exp.repetitions = sec.getint("repetitions", 1)
    exp.bench_repetitions = sec.getint("bench_repetitions", 5)
    if "size" in sec:
        exp.size = int(float(sec["size"]))
    if "grid" in sec:
        grid = _ints(sec["grid"])
        if len(grid) != 3:
            raise ConfigError(f"[experiment {name}]: grid needs three element counts")
        exp.grid = grid
    if "matrix" in sec:
        exp.matrix = base / sec["matrix"]
    if exp.size is None and exp.grid is None and exp.matrix is None:
        raise ConfigError(f"[experiment {name}]: give size, grid or matrix")
    if "trace_dir" in sec:
        exp.trace_dir = base / sec["trace_dir"]
        if "noise_trace" not in sec:
            raise ConfigError(f"[experiment {name}]: external traces need noise_trace")
        exp.noise_trace = base / sec["noise_trace"]

    model = read_model_spec(base / sec["model"]) if "model" in sec else kernel_model(kernel)
    levels = dict(model.phase_levels)
    for key, phase in (("kernel_w", "kernel"), ("alloc_copy_w", "alloc_copy"), ("copy_back_w", "copy_back")):
        if key in sec:
            levels[phase] = sec.getfloat(key)
    overrides = {"phase_levels": levels}
    for key in ("idle_w", "noise_sigma_w", "sample_period_s", "channel_split", "supply_volts"):
        if key in sec:
            overrides[key] = sec.getfloat(key)
    if "gains_a_per_v" in sec:
        overrides["gains"] = _floats(sec["gains_a_per_v"])
    exp.spike_reps = _ints(sec.get("spike_reps", ""))
    exp.spike_w = sec.getfloat("spike_w", 250.0)
    exp.stuck_draws = sec.getint("stuck_draws", 0)
    levels.setdefault("spike", exp.spike_w)
    exp.model = replace(model, **overrides)
    if any(r < 0 or r >= exp.repetitions for r in exp.spike_reps):
        raise ConfigError(f"[experiment {name}]: spike_reps must index repetitions")
    return exp


def parse_campaign_config(text: str, base_dir=".") -> CampaignConfig:
    base = Path(base_dir)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"campaign config: {exc}") from None
    try:
        experiments = []
        for section in cp.sections():
            if section == "campaign":
                continue
            kind, _, name = section.partition(" ")
            if kind != "experiment" or not name.strip():
                raise ConfigError(f"unexpected section [{section}]")
            experiments.append(_experiment(name.strip(), cp[section], base))

        g = cp["campaign"] if cp.has_section("campaign") else {}
        unknown = set(g) - _CAMPAIGN_KEYS
        if unknown:
            raise ConfigError(f"[campaign]: unknown keys {', '.join(sorted(unknown))}")
        get = (lambda k, d, f=str: f(g[k]) if k in g else d)
        return CampaignConfig(
            experiments=experiments,
            pattern_tolerance=get("pattern_tolerance", 0.02, float),
            idle_tolerance_w=get("idle_tolerance_w", None, float),
            output=(base / g["output"]) if "output" in g else None,
            seed=get("seed", 0, int),
            timing=get("timing", "model"),
            bandwidth_bytes_per_s=get("bandwidth_gbps", 10.0, float) * 1e9,
            min_phase_s=get("min_phase_s", 0.5, float),
            max_rewaits=get("max_rewaits", 3, int),
            detect=DetectParams(window=get("window", 50, int), k=get("k", 6.0, float)),
            filter_window=get("filter_window", 1, int),
            calibration_s=get("calibration_s", 1.0, float),
            workers=get("workers", 1, int),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"campaign config: {exc}") from None


def read_campaign_config(path) -> CampaignConfig:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_campaign_config(fh.read(), path.parent)
