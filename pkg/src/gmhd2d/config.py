"""Run configuration: strict TOML parsing and round-trippable serialization.

Unknown keys, missing required keys, and type mismatches are errors; there
are no silent defaults for misspelled keys.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .kernel import KernelProfile, LogWeak, PowerLaw, Tabulated


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridConfig:
    n: int


@dataclass(frozen=True)
class TimeConfig:
    t_end: float
    cfl: float = 0.5
    dt_max: float = 0.05
    sample_every: int = 10


@dataclass(frozen=True)
class InitConfig:
    preset: str
    amplitude: float = 1.0
    beta: float = 0.5          # orszag_tang only
    kmin: int = 2              # random_band only
    kmax: int = 8
    seed: int | None = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    snapshots: bool = False


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig
    time: TimeConfig
    kernel: KernelProfile
    init: InitConfig
    output: OutputConfig = field(default_factory=OutputConfig)


_PRESETS = ("orszag_tang", "random_band", "single_mode")


def _take(table: dict, section: str, key: str, typ, required=False, default=None):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    val = table.pop(key)
    if typ is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if typ is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise ConfigError(f"{section}.{key} must be an integer, got {val!r}")
    if not isinstance(val, typ):
        raise ConfigError(f"{section}.{key} must be {typ.__name__}, got {val!r}")
    return val


def _no_leftovers(table: dict, section: str):
    if table:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(table))}")


def _parse_kernel(raw: dict) -> KernelProfile:
    family = _take(raw, "kernel", "family", str, required=True)
    override = _take(raw, "kernel", "override_weak", bool, default=False)
    if family == "power_law":
        alpha = _take(raw, "kernel", "alpha", float, required=True)
        _no_leftovers(raw, "kernel")
        return PowerLaw(alpha=alpha, override_weak=override)
    if family == "log_weak":
        eps1 = _take(raw, "kernel", "eps1", float, required=True)
        eps2 = _take(raw, "kernel", "eps2", float, required=True)
        _no_leftovers(raw, "kernel")
        return LogWeak(eps1=eps1, eps2=eps2, override_weak=override)
    if family == "tabulated":
        radii = _take(raw, "kernel", "radii", list, required=True)
        values = _take(raw, "kernel", "values", list, required=True)
        _no_leftovers(raw, "kernel")
        try:
            radii = tuple(float(x) for x in radii)
            values = tuple(float(x) for x in values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"kernel.radii/values must be numeric: {exc}")
        return Tabulated(radii=radii, values=values, override_weak=override)
    raise ConfigError(f"kernel.family must be one of power_law, log_weak, "
                      f"tabulated; got {family!r}")


def config_from_dict(data: dict) -> RunConfig:
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in data.items()}
    for section in ("grid", "time", "kernel", "init"):
        if section not in data:
            raise ConfigError(f"missing required section [{section}]")
        if not isinstance(data[section], dict):
            raise ConfigError(f"[{section}] must be a table")

    graw = data.pop("grid")
    n = _take(graw, "grid", "n", int, required=True)
    _no_leftovers(graw, "grid")
    if n < 32 or n % 2:
        raise ConfigError(f"grid.n must be even and >= 32, got {n}")

    traw = data.pop("time")
    time = TimeConfig(
        t_end=_take(traw, "time", "t_end", float, required=True),
        cfl=_take(traw, "time", "cfl", float, default=0.5),
        dt_max=_take(traw, "time", "dt_max", float, default=0.05),
        sample_every=_take(traw, "time", "sample_every", int, default=10),
    )
    _no_leftovers(traw, "time")
    if time.t_end < 0:
        raise ConfigError("time.t_end must be non-negative")
    if not (0 < time.cfl <= 1):
        raise ConfigError("time.cfl must lie in (0, 1]")
    if time.dt_max <= 0 or time.sample_every < 1:
        raise ConfigError("time.dt_max must be > 0 and time.sample_every >= 1")

    kernel = _parse_kernel(data.pop("kernel"))

    iraw = data.pop("init")
    init = InitConfig(
        preset=_take(iraw, "init", "preset", str, required=True),
        amplitude=_take(iraw, "init", "amplitude", float, default=1.0),
        beta=_take(iraw, "init", "beta", float, default=0.5),
        kmin=_take(iraw, "init", "kmin", int, default=2),
        kmax=_take(iraw, "init", "kmax", int, default=8),
        seed=_take(iraw, "init", "seed", int, default=None),
    )
    _no_leftovers(iraw, "init")
    if init.preset not in _PRESETS:
        raise ConfigError(f"init.preset must be one of {_PRESETS}, got {init.preset!r}")
    if init.preset == "random_band" and init.seed is None:
        raise ConfigError("init.seed is required for the random_band preset")

    oraw = data.pop("output", {})
    output = OutputConfig(
        dir=_take(oraw, "output", "dir", str, default="out"),
        snapshots=_take(oraw, "output", "snapshots", bool, default=False),
    )
    _no_leftovers(oraw, "output")

    if data:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(data))}")
    return RunConfig(grid=GridConfig(n=n), time=time, kernel=kernel,
                     init=init, output=output)


def parse_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}")
    return config_from_dict(data)


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Deterministic TOML text that parse_config round-trips."""
    k = cfg.kernel
    kern: dict = {"family": k.family, "override_weak": k.override_weak}
    if isinstance(k, PowerLaw):
        kern["alpha"] = k.alpha
    elif isinstance(k, LogWeak):
        kern["eps1"] = k.eps1
        kern["eps2"] = k.eps2
    elif isinstance(k, Tabulated):
        kern["radii"] = k.radii
        kern["values"] = k.values

    init: dict = {"preset": cfg.init.preset, "amplitude": cfg.init.amplitude}
    if cfg.init.preset == "orszag_tang":
        init["beta"] = cfg.init.beta
    if cfg.init.preset == "random_band":
        init["kmin"] = cfg.init.kmin
        init["kmax"] = cfg.init.kmax
        init["seed"] = cfg.init.seed

    sections = {
        "grid": {"n": cfg.grid.n},
        "time": {"t_end": cfg.time.t_end, "cfl": cfg.time.cfl,
                 "dt_max": cfg.time.dt_max, "sample_every": cfg.time.sample_every},
        "kernel": kern,
        "init": init,
        "output": {"dir": cfg.output.dir, "snapshots": cfg.output.snapshots},
    }
    lines = []
    for name, table in sections.items():
        lines.append(f"[{name}]")
        for key, val in table.items():
            lines.append(f"{key} = {_toml_scalar(val)}")
        lines.append("")
    return "\n".join(lines)
