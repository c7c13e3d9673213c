"""Run configuration: presets and the key = value config-file format.

Config files are INI-style with sections ``[scenario]``, ``[solver]``,
``[earth]`` and ``[run]``; every key is optional and overrides the preset it
is layered on. The ``paper-vi`` preset carries the benchmark defaults (200 s
coning flight at 100 Hz, 8-sample windows, fit degrees 7, truncation degree
9, at most 9 iterations to an RMS change of 1e-16).
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .earth import EarthModel
from .kinematics import TwistVariant
from .tqfilter import INCREMENTS, RATES, SolverConfig, benchmark_config
from .trajectory import ScenarioParams

ALGORITHMS = ("tq", "twosample", "rk4")


@dataclass(frozen=True)
class RunConfig:
    """Everything one scenario run needs."""

    scenario: ScenarioParams
    solver: SolverConfig
    earth: EarthModel
    samples_per_window: int = 8
    imu_mode: str = INCREMENTS
    algos: tuple = ("tq", "twosample")
    out_dir: str = "out"
    decimate: int = 1
    strict: bool = False
    figures: bool = True
    rk4_substeps: int = 10  # RK4 reference substeps per IMU sample

    def __post_init__(self):
        if not self.algos:
            raise ValueError("select at least one algorithm")
        for a in self.algos:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r} (choose from {ALGORITHMS})")
        if self.decimate < 1:
            raise ValueError("decimation factor must be >= 1")
        if self.imu_mode not in (RATES, INCREMENTS):
            raise ValueError(f"unknown IMU mode {self.imu_mode!r}")


def preset(name: str) -> RunConfig:
    if name != "paper-vi":
        raise ValueError(f"unknown preset {name!r}")
    earth = EarthModel.wgs84()
    return RunConfig(
        scenario=ScenarioParams(),
        solver=benchmark_config(earth, samples_per_window=8),
        earth=earth,
    )


def _coerce(value: str, target):
    if isinstance(target, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(target, int):
        return int(value)
    if isinstance(target, float):
        return float(value)
    return value


def _override_dataclass(obj, section):
    fields = {f.name: f for f in dataclasses.fields(obj)}
    updates = {}
    for key, raw in section.items():
        if key not in fields:
            raise ValueError(f"unknown key {key!r} for {type(obj).__name__}")
        current = getattr(obj, key)
        if key == "variant":
            updates[key] = TwistVariant(raw.strip())
        elif key == "gravity_nodes":
            updates[key] = None if raw.strip().lower() == "auto" else int(raw)
        else:
            updates[key] = _coerce(raw, current)
    return dataclasses.replace(obj, **updates) if updates else obj


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    """Layer a config file over a base (default: the paper-vi preset)."""
    cfg = base if base is not None else preset("paper-vi")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    parser.read_string(text)
    scenario = cfg.scenario
    solver = cfg.solver
    earth = cfg.earth
    run_updates = {}
    for section in parser.sections():
        if section == "scenario":
            scenario = _override_dataclass(scenario, parser[section])
        elif section == "solver":
            solver = _override_dataclass(solver, parser[section])
        elif section == "earth":
            earth = _override_dataclass(earth, parser[section])
        elif section == "run":
            for key, raw in parser[section].items():
                if key == "algos":
                    run_updates["algos"] = tuple(
                        a.strip() for a in raw.split(",") if a.strip()
                    )
                elif key in ("samples_per_window", "decimate", "rk4_substeps"):
                    run_updates[key] = int(raw)
                elif key in ("strict", "figures"):
                    run_updates[key] = _coerce(raw, True)
                elif key in ("out_dir", "imu_mode"):
                    run_updates[key] = raw.strip()
                else:
                    raise ValueError(f"unknown key {key!r} in [run]")
        else:
            raise ValueError(f"unknown config section [{section}]")
    return dataclasses.replace(
        cfg, scenario=scenario, solver=solver, earth=earth, **run_updates
    )


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int, str)):
        return str(v)
    return repr(float(v))


def write_config(path, cfg: RunConfig) -> Path:
    """Serialize a RunConfig in the key = value format (round-trips load)."""
    lines = ["[scenario]"]
    for f in dataclasses.fields(cfg.scenario):
        lines.append(f"{f.name} = {_fmt_value(getattr(cfg.scenario, f.name))}")
    lines.append("")
    lines.append("[solver]")
    for f in dataclasses.fields(cfg.solver):
        val = getattr(cfg.solver, f.name)
        if f.name == "variant":
            val = val.value
        if f.name == "gravity_nodes" and val is None:
            val = "auto"
        lines.append(f"{f.name} = {_fmt_value(val)}")
    lines.append("")
    lines.append("[earth]")
    for f in dataclasses.fields(cfg.earth):
        lines.append(f"{f.name} = {_fmt_value(getattr(cfg.earth, f.name))}")
    lines.append("")
    lines.append("[run]")
    lines.append(f"samples_per_window = {cfg.samples_per_window}")
    lines.append(f"imu_mode = {cfg.imu_mode}")
    lines.append(f"algos = {','.join(cfg.algos)}")
    lines.append(f"out_dir = {cfg.out_dir}")
    lines.append(f"decimate = {cfg.decimate}")
    lines.append(f"strict = {cfg.strict}")
    lines.append(f"figures = {cfg.figures}")
    lines.append(f"rk4_substeps = {cfg.rk4_substeps}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path
