"""Run configuration: plain-text key = value sections, validated up front.

Every numeric constraint of the material and loading types is checked before
any computation starts, so solver code never sees an invalid parameter set.
Configurations round-trip exactly through ``serialize_config`` /
``parse_config_string``.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields

from .driver import PAPER_WAVE_KNOTS, LoadProgram
from .errors import ConfigError
from .material import MaterialParams
from .mesh import PRESETS

# key -> (section, type tag)
_SCHEMA: dict[str, tuple[str, str]] = {
    "preset": ("run", "str"),
    "seed": ("run", "int"),
    "n_steps": ("run", "int"),
    "t_final": ("run", "float"),
    "elastic_tol": ("run", "float"),
    "sweep_rtol": ("run", "float"),
    "max_sweeps": ("run", "int"),
    "nx": ("mesh", "int"),
    "ny": ("mesh", "int"),
    "alpha": ("material", "float"),
    "delta1": ("material", "float"),
    "delta2": ("material", "float"),
    "epsilon": ("material", "float"),
    "beta": ("material", "float"),
    "alpha_i": ("material", "float"),
    "alpha_s": ("material", "float"),
    "wave_knots": ("loading", "knots"),
    "out_dir": ("output", "str"),
    "emit_snapshots": ("output", "bool"),
    "run_diagnostics": ("output", "bool"),
}

_SECTIONS = ("run", "mesh", "material", "loading", "output")

#: Interface coefficient each preset uses unless overridden.
PRESET_ALPHA_I = {"example1": 0.0, "example2": 0.001, "custom": 0.0}

DEFAULT_SEED = 20180816


@dataclass(frozen=True)
class RunConfig:
    preset: str = "example1"
    seed: int = DEFAULT_SEED
    n_steps: int = 16
    t_final: float = 16.0
    elastic_tol: float = 1e-6
    sweep_rtol: float = 1e-8
    max_sweeps: int = 50
    nx: int = 16
    ny: int = 8
    alpha: float = 1.0
    delta1: float = 1.0
    delta2: float = 4.0
    epsilon: float = 0.3
    beta: float = 0.1
    alpha_i: float = 0.0
    alpha_s: float = 0.0
    wave_knots: tuple[tuple[float, float], ...] = PAPER_WAVE_KNOTS
    out_dir: str = ""
    emit_snapshots: bool = True
    run_diagnostics: bool = False

    def material_params(self) -> MaterialParams:
        try:
            return MaterialParams(
                alpha=self.alpha, delta1=self.delta1, delta2=self.delta2,
                epsilon=self.epsilon, beta=self.beta,
                alpha_i=self.alpha_i, alpha_s=self.alpha_s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def load_program(self) -> LoadProgram:
        return LoadProgram(t_final=self.t_final, n_steps=self.n_steps,
                           wave_knots=self.wave_knots, preset=self.preset)

    def validate(self) -> "RunConfig":
        if self.preset not in PRESETS:
            raise ConfigError(f"preset: unknown value {self.preset!r}")
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"nx/ny: cell counts must be >= 1, got {self.nx}x{self.ny}")
        if self.n_steps < 1:
            raise ConfigError(f"n_steps: must be >= 1, got {self.n_steps}")
        if self.t_final <= 0:
            raise ConfigError(f"t_final: must be > 0, got {self.t_final}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be >= 0, got {self.seed}")
        if self.elastic_tol <= 0 or self.sweep_rtol <= 0:
            raise ConfigError("elastic_tol/sweep_rtol: tolerances must be > 0")
        if self.max_sweeps < 1:
            raise ConfigError(f"max_sweeps: must be >= 1, got {self.max_sweeps}")
        knots = self.wave_knots
        if len(knots) < 2:
            raise ConfigError("wave_knots: need at least two knots")
        times = [k[0] for k in knots]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ConfigError("wave_knots: knot times must be strictly increasing")
        if times[0] != 0.0:
            raise ConfigError(f"wave_knots: first knot must be at t = 0, got {times[0]}")
        if times[-1] != self.t_final:
            raise ConfigError(
                f"wave_knots: last knot at t = {times[-1]} must match t_final = {self.t_final}")
        self.material_params()
        return self


def _parse_knots(text: str) -> tuple[tuple[float, float], ...]:
    knots = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            t_str, a_str = part.split(":")
            knots.append((float(t_str), float(a_str)))
        except ValueError as exc:
            raise ConfigError(f"wave_knots: cannot parse knot {part!r}") from exc
    return tuple(knots)


def _format_knots(knots: tuple[tuple[float, float], ...]) -> str:
    return ", ".join(f"{repr(t)}:{repr(a)}" for t, a in knots)


def _parse_bool(key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _coerce(key: str, raw: str):
    kind = _SCHEMA[key][1]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            return _parse_bool(key, raw)
        if kind == "knots":
            return _parse_knots(raw)
        return raw.strip()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}") from exc


def _read_sections(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    values: dict[str, str] = {}
    for section in parser.sections():
        if section == "meta":
            continue  # provenance block written by the run emitter
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA or _SCHEMA[key][0] != section:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[key] = raw
    return values


def _build(values: dict[str, str], overrides: dict[str, str] | None) -> RunConfig:
    overrides = dict(overrides or {})
    for key in overrides:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}")

    preset = str(overrides.get("preset", values.get("preset", "example1"))).strip()
    if preset not in PRESETS:
        raise ConfigError(f"preset: unknown value {preset!r}")

    merged: dict[str, object] = {"preset": preset, "alpha_i": PRESET_ALPHA_I[preset]}
    for key, raw in values.items():
        merged[key] = _coerce(key, raw)
    for key, raw in overrides.items():
        merged[key] = _coerce(key, str(raw))
    try:
        cfg = RunConfig(**merged)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def parse_config_string(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    return _build(_read_sections(text), overrides)


def parse_config(path: str | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    """Config from an optional file plus flag overrides (flags win)."""
    if path is None:
        return _build({}, overrides)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_string(text, overrides)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parses back to an equal RunConfig."""
    parser = configparser.ConfigParser()
    for section in _SECTIONS:
        parser.add_section(section)
    for f in fields(RunConfig):
        key = f.name
        section = _SCHEMA[key][0]
        value = getattr(cfg, key)
        if key == "wave_knots":
            parser.set(section, key, _format_knots(value))
        elif isinstance(value, bool):
            parser.set(section, key, "true" if value else "false")
        elif isinstance(value, float):
            parser.set(section, key, repr(value))
        else:
            parser.set(section, key, str(value))
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()
