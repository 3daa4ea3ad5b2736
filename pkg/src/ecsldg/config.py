"""Run configuration: file format, validation, and named presets.

Config files are flat ``key = value`` pairs grouped under ``[section]``
headers (sections: run, grid, time, output, study); ``#`` and ``;`` start
comments.  The exact grammar is documented in README.md.  Unknown keys,
a missing scenario, and over/under-specified time control are rejected
with a diagnostic naming the offending key.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .scenarios import SCENARIO_NAMES
from .splitting import SplittingScheme, parse_scheme
from .stepper import FIELD_MODES, TimeControl

STUDY_KINDS = ("single", "reversibility", "temporal_convergence", "cfl_sweep")
_STUDY_ALIASES = {"spatial_convergence": "reversibility", "temporal": "temporal_convergence"}


class ConfigError(ValueError):
    """Invalid configuration (CLI exits 2)."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    n_x: int = 64
    n_v: int = 64
    k: int = 2
    v_max: float = 10.0
    lam: float = 1.0
    scheme: str = "tenlie"
    mode: str = "ec"
    cfl: Optional[float] = None
    dt: Optional[float] = None
    t_final: float = 5.0
    study: str = "single"
    series_name: str = "series.csv"
    snapshot_times: tuple = ()
    # study knobs (defaults reproduce the benchmark tables)
    meshes: tuple = (40, 60, 80, 100)
    degrees: tuple = (1, 2, 3)
    # large steps keep the splitting error above the semi-Lagrangian
    # re-projection noise floor (see run_temporal_study)
    cfls: tuple = (80.0, 50.0, 32.0, 20.0)
    ref_cfl: float = 0.01
    schemes: tuple = ("tenlie", "ss3", "strang", "lie")
    sweep_cfls: tuple = (1.0, 10.0, 20.0, 40.0, 80.0)

    def __post_init__(self):
        if self.scenario not in SCENARIO_NAMES:
            raise ConfigError(
                f"scenario: unknown value {self.scenario!r}; choose from {list(SCENARIO_NAMES)}"
            )
        if self.n_x < 4 or self.n_v < 4:
            raise ConfigError(f"nx/nv: need at least 4 cells, got {self.n_x}x{self.n_v}")
        if not 0 <= self.k <= 8:
            raise ConfigError(f"k: degree {self.k} outside [0, 8]")
        if self.study == "reversibility" and any(k < 1 or k > 3 for k in self.degrees):
            raise ConfigError("degrees: reversibility study supports 1 <= k <= 3")
        if (self.cfl is None) == (self.dt is None):
            raise ConfigError(
                "cfl/dt: time control over-specified" if self.cfl is not None
                else "cfl/dt: set exactly one of cfl or dt"
            )
        if not self.t_final > 0:
            raise ConfigError(f"T: final time must be positive, got {self.t_final}")
        if not self.v_max > 0:
            raise ConfigError(f"vm: velocity bound must be positive, got {self.v_max}")
        if not self.lam > 0:
            raise ConfigError(f"lambda: Debye length must be positive, got {self.lam}")
        if self.mode not in FIELD_MODES:
            raise ConfigError(f"mode: {self.mode!r} not one of {list(FIELD_MODES)}")
        if self.study not in STUDY_KINDS:
            raise ConfigError(f"study: {self.study!r} not one of {list(STUDY_KINDS)}")
        try:
            parse_scheme(self.scheme)
            for s in self.schemes:
                parse_scheme(s)
        except ValueError as exc:
            raise ConfigError(f"scheme: {exc}") from None

    def splitting(self) -> SplittingScheme:
        return parse_scheme(self.scheme)

    def time_control(self) -> TimeControl:
        return TimeControl(cfl=self.cfl, dt=self.dt)


_KEYMAP = {
    ("run", "scenario"): ("scenario", str),
    ("run", "scheme"): ("scheme", str),
    ("run", "mode"): ("mode", str),
    ("run", "study"): ("study", str),
    ("grid", "nx"): ("n_x", int),
    ("grid", "nv"): ("n_v", int),
    ("grid", "k"): ("k", int),
    ("grid", "vm"): ("v_max", float),
    ("grid", "lambda"): ("lam", float),
    ("time", "cfl"): ("cfl", float),
    ("time", "dt"): ("dt", float),
    ("time", "t"): ("t_final", float),
    ("output", "series"): ("series_name", str),
    ("output", "snapshots"): ("snapshot_times", "float_list"),
    ("study", "meshes"): ("meshes", "int_list"),
    ("study", "degrees"): ("degrees", "int_list"),
    ("study", "cfls"): ("cfls", "float_list"),
    ("study", "ref_cfl"): ("ref_cfl", float),
    ("study", "schemes"): ("schemes", "str_list"),
    ("study", "sweep_cfls"): ("sweep_cfls", "float_list"),
}


def _convert(raw: str, kind, where: str):
    try:
        if kind is str:
            return raw
        if kind is int:
            return int(raw)
        if kind is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError("not finite")
            return val
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if kind == "int_list":
            return tuple(int(s) for s in items)
        if kind == "float_list":
            return tuple(float(s) for s in items)
        return tuple(items)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} ({exc})") from None


def parse_config(text: str) -> RunConfig:
    """Parse the key = value / [section] format into a validated RunConfig."""
    section = "run"
    fields = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("run", "grid", "time", "output", "study"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().lower()
        raw = raw.strip()
        if (section, key) not in _KEYMAP:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        attr, kind = _KEYMAP[(section, key)]
        value = _convert(raw, kind, f"line {lineno}: {key}")
        if attr == "study":
            value = _STUDY_ALIASES.get(value, value)
        fields[attr] = value
    if "scenario" not in fields:
        raise ConfigError("scenario: missing (section [run], key scenario)")
    return RunConfig(**fields)


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _cfg(**kw) -> RunConfig:
    return RunConfig(**kw)


PRESETS = {
    # single runs matching the benchmark figures
    "weak_landau_cfl1": _cfg(scenario="weak_landau", n_x=128, n_v=128, cfl=1.0,
                             t_final=50.0, scheme="strang"),
    "weak_landau_ae_cfl1": _cfg(scenario="weak_landau", n_x=128, n_v=128, cfl=1.0,
                                t_final=50.0, scheme="strang", mode="ae"),
    "strong_landau_cfl10": _cfg(scenario="strong_landau", n_x=128, n_v=128,
                                cfl=10.0, t_final=50.0),
    "strong_landau_cfl20_strang": _cfg(scenario="strong_landau", n_x=128, n_v=128,
                                       cfl=20.0, t_final=50.0, scheme="strang"),
    "strong_landau_cfl20_tenlie": _cfg(scenario="strong_landau", n_x=128, n_v=128,
                                       cfl=20.0, t_final=50.0, scheme="tenlie"),
    "two_stream_i_cfl10": _cfg(scenario="two_stream_i", n_x=128, n_v=128,
                               cfl=10.0, t_final=50.0),
    "two_stream_ii_nx32": _cfg(scenario="two_stream_ii", n_x=32, n_v=128,
                               cfl=10.0, t_final=50.0),
    "two_stream_ii_nx64": _cfg(scenario="two_stream_ii", n_x=64, n_v=128,
                               cfl=10.0, t_final=50.0),
    "two_stream_ii_nx128": _cfg(scenario="two_stream_ii", n_x=128, n_v=128,
                                cfl=10.0, t_final=50.0),
    "two_stream_ii_lambda001_dt02": _cfg(scenario="two_stream_ii", n_x=128, n_v=128,
                                         lam=0.01, dt=0.2, t_final=50.0),
    "two_stream_ii_lambda001_dt01": _cfg(scenario="two_stream_ii", n_x=128, n_v=128,
                                         lam=0.01, dt=0.1, t_final=50.0),
    "two_stream_ii_lambda001_dt005": _cfg(scenario="two_stream_ii", n_x=128, n_v=128,
                                          lam=0.01, dt=0.05, t_final=50.0),
    # study drivers
    "weak_landau_spatial": _cfg(scenario="weak_landau", study="reversibility",
                                scheme="ss3", cfl=0.1, t_final=0.5),
    "weak_landau_temporal_128": _cfg(scenario="weak_landau", study="temporal_convergence",
                                     n_x=128, n_v=128, cfl=0.8, t_final=5.0),
    "weak_landau_temporal_64": _cfg(scenario="weak_landau", study="temporal_convergence",
                                    n_x=64, n_v=64, cfl=0.8, t_final=5.0),
    "two_stream_i_sweep": _cfg(scenario="two_stream_i", study="cfl_sweep",
                               n_x=128, n_v=128, cfl=1.0, t_final=50.0),
}


def preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"preset: unknown name {name!r}; choose from {sorted(PRESETS)}"
        ) from None


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **kw)
