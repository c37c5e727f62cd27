"""Run configuration: INI-style files, validation, reproducibility headers.

Every output file starts with '# '-prefixed lines echoing the effective
configuration (command, seed, model, command block).  Those lines re-parse
to an identical RunConfig, so any output can be regenerated byte-for-byte
from its own header.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields

from .model import ModelParams

__all__ = ["ConfigError", "RunConfig", "parse_config", "parse_header", "header_lines"]


class ConfigError(ValueError):
    """Invalid, unknown or missing configuration content."""


@dataclass(frozen=True)
class SpectrumSpec:
    x_min: float = 0.0
    x_max: float = 4.0
    n: int = 801


@dataclass(frozen=True)
class CutSpec:
    axis: str = "p"          # "p" | "gamma_c"
    min: float = 0.05
    max: float = 2.0
    n: int = 401


@dataclass(frozen=True)
class EvolveSpec:
    start: str = "equal_superposition"  # equal_superposition | near_upper | random | explicit
    psi_c_re: float = 0.1
    psi_c_im: float = 0.0
    psi_x_re: float = 0.1
    psi_x_im: float = 0.0
    dt: float = 0.01
    t_end: float = 800.0
    stride: int = 5
    transient_fraction: float = 0.5


@dataclass(frozen=True)
class SweepSpec:
    gamma_min: float = 0.2
    gamma_max: float = 1.6
    p_min: float = 0.05
    p_max: float = 2.0
    n_gamma: int = 200
    n_p: int = 200
    jobs: int = 1


@dataclass(frozen=True)
class LocateSpec:
    target: str = "both"     # ep | et | both
    gamma_lo: float = 1.0
    gamma_hi: float = 1.8
    p_min: float = 0.02
    p_max: float = 2.2


@dataclass(frozen=True)
class ThresholdSpec:
    p_min: float = 0.02
    p_max: float = 2.0
    n: int = 800


_SPEC_SECTIONS = {
    "spectrum": SpectrumSpec,
    "stability": CutSpec,
    "evolve": EvolveSpec,
    "sweep": SweepSpec,
    "locate": LocateSpec,
    "thresholds": ThresholdSpec,
}

_MODEL_KEYS = ("gamma_c", "p", "e_c", "e_x", "omega_r", "g1", "g2")
_RUN_KEYS = ("command", "seed")

_CHOICES = {
    ("stability", "axis"): ("p", "gamma_c"),
    ("evolve", "start"): ("equal_superposition", "near_upper", "random", "explicit"),
    ("locate", "target"): ("ep", "et", "both"),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for one CLI invocation."""

    model: ModelParams
    command: str = ""
    seed: int = 0
    spectrum: SpectrumSpec = field(default_factory=SpectrumSpec)
    stability: CutSpec = field(default_factory=CutSpec)
    evolve: EvolveSpec = field(default_factory=EvolveSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    locate: LocateSpec = field(default_factory=LocateSpec)
    thresholds: ThresholdSpec = field(default_factory=ThresholdSpec)


def _convert(section: str, key: str, raw: str, target_type: type):
    try:
        if target_type is int:
            value = int(raw)
        elif target_type is float:
            value = float(raw)
        else:
            value = raw
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: expected {target_type.__name__}") from exc
    allowed = _CHOICES.get((section, key))
    if allowed and value not in allowed:
        raise ConfigError(f"[{section}] {key} = {raw!r}: must be one of {allowed}")
    return value


def _build_spec(section: str, cls, items: dict):
    by_name = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, raw in items.items():
        if key not in by_name:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        kwargs[key] = _convert(section, key, raw, type(by_name[key].default))
    return cls(**kwargs)


def parse_config(text: str) -> RunConfig:
    """Parse and validate INI-style configuration text."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for section in cp.sections():
        if section not in ("run", "model", *_SPEC_SECTIONS):
            raise ConfigError(f"unknown section [{section}]")

    run_items = dict(cp.items("run")) if cp.has_section("run") else {}
    for key in run_items:
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown key {key!r} in section [run]")
    command = run_items.get("command", "")
    seed = _convert("run", "seed", run_items.get("seed", "0"), int)

    if not cp.has_section("model"):
        raise ConfigError("missing required section [model]")
    model_items = dict(cp.items("model"))
    for key in model_items:
        if key not in _MODEL_KEYS:
            raise ConfigError(f"unknown key {key!r} in section [model]")
    for key in ("gamma_c", "p"):
        if key not in model_items:
            raise ConfigError(f"[model] requires {key}")
    model_kwargs = {k: _convert("model", k, v, float) for k, v in model_items.items()}
    try:
        model = ModelParams(**model_kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc

    spec_values = {}
    for section, cls in _SPEC_SECTIONS.items():
        items = dict(cp.items(section)) if cp.has_section(section) else {}
        spec_values[section] = _build_spec(section, cls, items)

    return RunConfig(model=model, command=command, seed=seed, **spec_values)


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def header_lines(config: RunConfig, command: str) -> list[str]:
    """The '# '-prefixed reproducibility header for output files."""
    lines = [
        "# twomode run configuration (re-parseable; regenerates this file)",
        "# [run]",
        f"# command = {command}",
        f"# seed = {config.seed}",
        "# [model]",
    ]
    m = config.model
    for key in _MODEL_KEYS:
        lines.append(f"# {key} = {_fmt(getattr(m, key))}")
    if command in _SPEC_SECTIONS:
        spec = getattr(config, command)
        lines.append(f"# [{command}]")
        for f in fields(spec):
            lines.append(f"# {f.name} = {_fmt(getattr(spec, f.name))}")
    return lines


def parse_header(text: str) -> RunConfig:
    """Recover the RunConfig from an output file's comment header."""
    ini = io.StringIO()
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        body = line[1:].strip()
        if body.startswith("[") or "=" in body:
            ini.write(body + "\n")
    recovered = ini.getvalue()
    if not recovered.strip():
        raise ConfigError("no configuration header found")
    return parse_config(recovered)
