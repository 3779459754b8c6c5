"""Experiment configuration files.

A config is a flat YAML mapping; every value is a scalar or a list. Example::

    command: converge
    preset: ex2_nonlinear
    k: 3
    cfl: [0.5, 1, 2]
    grids: 20..640        # doublings; an explicit list also works

Unknown keys are errors. See ``CONFIG_KEYS`` for the accepted keys and
``parse_config`` for defaults.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .problems import PRESET_NAMES, preset
from .solver import resolve_betas
from .stability import beta_max_semi
from .timestep import ConfigurationError

COMMANDS = ("run", "converge", "stability", "compare", "probe")
STABILITY_MODES = ("semi1d", "semi2d", "full")

CONFIG_KEYS = {
    "command": "one of run, converge, stability, compare, probe",
    "preset": "problem name (run, converge)",
    "k": "order 1, 2 or 3 (default 3); compare accepts a list",
    "cfl": "CFL number or list of them (default 1)",
    "grids": "strictly increasing list of n, or 'a..b' for doublings from a to b",
    "n": "grid size for run (default: last of grids, else 100)",
    "t_end": "final time (default 1)",
    "variant": "H1, H2, H3 or Hold (default H3)",
    "beta1": "transport beta override",
    "beta2": "diffusion beta override",
    "snapshots": "list of output times for run",
    "mode": "stability scan: semi1d, semi2d or full (default semi1d)",
    "beta": "beta for the stability scan (default: the computed bound 2 / max S_k)",
    "cross_ratio": "(A12 + A21) / sqrt(A11 A22) for semi2d (default 0)",
    "points": "scan resolution (default 10000 for semi1d, 200 for semi2d, 256 for full)",
    "variants": "compare/probe: list of variants (default [H3, H_old] / [H1, H2, H3])",
    "repeats": "compare: timing repeats, median reported (default 5)",
    "test_function": "probe: sin_x or sin_2x (default sin_x)",
    "alphas": "probe: increasing alpha list or 'a..b' doublings (default 2..256)",
    "seed": "reserved; unused by the numerics",
}


@dataclass
class HarnessConfig:
    command: str
    preset: Optional[str] = None
    k: int = 3
    ks: tuple[int, ...] = (3,)
    cfl: tuple[float, ...] = (1.0,)
    grids: tuple[int, ...] = ()
    n: Optional[int] = None
    t_end: float = 1.0
    variant: str = "H3"
    beta1: Optional[float] = None
    beta2: Optional[float] = None
    snapshots: tuple[float, ...] = ()
    mode: str = "semi1d"
    beta: Optional[float] = None
    cross_ratio: float = 0.0
    points: Optional[int] = None
    variants: tuple[str, ...] = ()
    repeats: int = 5
    test_function: str = "sin_x"
    alphas: tuple[float, ...] = tuple(2.0**j for j in range(1, 9))
    seed: Optional[int] = None
    source: str = field(default="<inline>", compare=False)


def _doublings(text: str, key: str, cast):
    lo, _, hi = text.partition("..")
    try:
        a, b = cast(lo.strip()), cast(hi.strip())
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse range {text!r}") from None
    if not 0 < a <= b:
        raise ConfigurationError(f"{key}: range {text!r} must satisfy 0 < start <= stop")
    out = [a]
    while out[-1] * 2 <= b * (1 + 1e-12):
        out.append(out[-1] * 2)
    return out


def _as_list(value, key: str, cast):
    if isinstance(value, str) and ".." in value:
        return _doublings(value, key, cast)
    items = value if isinstance(value, list) else [value]
    out = []
    for item in items:
        if isinstance(item, bool):
            raise ConfigurationError(f"{key}: expected a number, got {item!r}")
        try:
            out.append(cast(item))
        except (TypeError, ValueError):
            raise ConfigurationError(f"{key}: expected a number, got {item!r}") from None
    return out


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigurationError(f"{key}: expected an integer, got {value!r}")
    return int(value)


def _as_float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigurationError(f"{key}: expected a finite number, got {value!r}")
    return float(value)


def _check_k(k: int, key: str = "k") -> int:
    if k not in (1, 2, 3):
        raise ConfigurationError(f"{key}: must be 1, 2 or 3, got {k}")
    return k


def _key_lines(text: str) -> dict[str, int]:
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value if isinstance(k, yaml.ScalarNode)}


def load_mapping(path: str | Path) -> dict[str, Any]:
    """Read a config file into a plain mapping, with file/line context on errors."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" line {mark.line + 1}" if mark is not None else ""
        raise ConfigurationError(f"{path}:{where} malformed config: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a key: value mapping")
    lines = _key_lines(text)
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigurationError(f"{path}:{lines.get(key, '?')}: {key}: nested mappings are not allowed")
    return _Located(data, lines)


class _Located(dict):
    """Config mapping that remembers the source line of each key."""

    def __init__(self, data: dict, lines: dict[str, int]):
        super().__init__(data)
        self.lines = lines


def parse_config(source: str | Path | dict) -> HarnessConfig:
    """Validate a config file (or an already-loaded mapping) and fill in defaults."""
    if isinstance(source, dict) and not isinstance(source, _Located):
        data, label, lines = dict(source), "<inline>", {}
    else:
        data = source if isinstance(source, _Located) else load_mapping(source)
        label, lines = ("<inline>" if data is source else str(source)), data.lines
    try:
        return _parse(data, label)
    except ConfigurationError as exc:
        msg = str(exc)
        key = msg.split(":", 1)[0]
        if key in lines:
            raise ConfigurationError(f"{label}:{lines[key]}: {msg}") from None
        raise ConfigurationError(f"{label}: {msg}") from None


def _parse(data: dict, label: str) -> HarnessConfig:
    unknown = [key for key in data if key not in CONFIG_KEYS]
    if unknown:
        raise ConfigurationError(f"{unknown[0]}: unknown key (accepted: {', '.join(CONFIG_KEYS)})")
    command = data.get("command")
    if command not in COMMANDS:
        raise ConfigurationError(f"command: must be one of {', '.join(COMMANDS)}, got {command!r}")
    cfg = HarnessConfig(command=command, source=label)

    if "k" in data:
        ks = [_check_k(_as_int(v, "k")) for v in (data["k"] if isinstance(data["k"], list) else [data["k"]])]
        if command != "compare" and len(ks) != 1:
            raise ConfigurationError(f"k: a list is only allowed for compare")
        cfg.ks = tuple(ks)
        cfg.k = ks[0]
    elif command == "compare":
        cfg.ks = (2, 3)
    if "cfl" in data:
        cfg.cfl = tuple(_as_list(data["cfl"], "cfl", float))
        if any(not (c > 0 and math.isfinite(c)) for c in cfg.cfl):
            raise ConfigurationError(f"cfl: values must be positive, got {list(cfg.cfl)}")
    if "grids" in data:
        grids = _as_list(data["grids"], "grids", int)
        if any(b <= a for a, b in zip(grids, grids[1:])):
            raise ConfigurationError(f"grids: sequence must be strictly increasing, got {grids}")
        if any(g < 6 for g in grids):
            raise ConfigurationError(f"grids: every grid needs at least 6 cells")
        cfg.grids = tuple(grids)
    if "n" in data:
        cfg.n = _as_int(data["n"], "n")
    if "t_end" in data:
        cfg.t_end = _as_float(data["t_end"], "t_end")
        if cfg.t_end <= 0:
            raise ConfigurationError(f"t_end: must be positive")
    if "variant" in data:
        cfg.variant = str(data["variant"])
        if cfg.variant not in ("H1", "H2", "H3", "Hold"):
            raise ConfigurationError(f"variant: must be H1, H2, H3 or Hold, got {cfg.variant!r}")
    for key in ("beta1", "beta2", "beta", "cross_ratio"):
        if key in data:
            setattr(cfg, key, _as_float(data[key], key))
    for key in ("beta1", "beta2", "beta"):
        value = getattr(cfg, key)
        if value is not None and value <= 0:
            raise ConfigurationError(f"{key}: must be positive, got {value}")
    if "snapshots" in data:
        cfg.snapshots = tuple(_as_list(data["snapshots"], "snapshots", float))
        if any(s < 0 or s > cfg.t_end for s in cfg.snapshots):
            raise ConfigurationError(f"snapshots: times must lie in [0, t_end={cfg.t_end}]")
    if "mode" in data:
        cfg.mode = str(data["mode"])
        if cfg.mode not in STABILITY_MODES:
            raise ConfigurationError(f"mode: must be one of {', '.join(STABILITY_MODES)}")
    if "points" in data:
        cfg.points = _as_int(data["points"], "points")
        if cfg.points < 2:
            raise ConfigurationError(f"points: need at least 2")
    if "variants" in data:
        cfg.variants = tuple(str(v) for v in (data["variants"] if isinstance(data["variants"], list)
                                               else [data["variants"]]))
        bad = [v for v in cfg.variants if v not in ("H1", "H2", "H3", "Hold", "H_old")]
        if bad:
            raise ConfigurationError(f"variants: unknown {bad}")
    if "repeats" in data:
        cfg.repeats = _as_int(data["repeats"], "repeats")
        if cfg.repeats < 1:
            raise ConfigurationError(f"repeats: need at least 1")
    if "test_function" in data:
        cfg.test_function = str(data["test_function"])
        if cfg.test_function not in ("sin_x", "sin_2x"):
            raise ConfigurationError(f"test_function: must be sin_x or sin_2x")
    if "alphas" in data:
        alphas = _as_list(data["alphas"], "alphas", float)
        if any(b <= a for a, b in zip(alphas, alphas[1:])) or alphas[0] <= 0:
            raise ConfigurationError(f"alphas: must be positive and strictly increasing")
        cfg.alphas = tuple(alphas)
    if "seed" in data:
        cfg.seed = _as_int(data["seed"], "seed")

    if command in ("run", "converge"):
        name = data.get("preset")
        if name is None:
            raise ConfigurationError(f"preset: required for {command}")
        if name not in PRESET_NAMES:
            raise ConfigurationError(f"preset: unknown {name!r}; choose from {', '.join(PRESET_NAMES)}")
        cfg.preset = name
        if command == "converge":
            if not cfg.grids:
                raise ConfigurationError(f"grids: required for converge")
            if preset(name).exact is None:
                raise ConfigurationError(f"preset: {name!r} has no exact solution to converge to")
        if command == "run" and cfg.n is None:
            cfg.n = cfg.grids[-1] if cfg.grids else 100
        # fill beta defaults now so an out-of-bound override warns at parse time
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            resolve_betas(preset(name), cfg.k, cfg.beta1, cfg.beta2, cfg.variant)
    elif "preset" in data:
        raise ConfigurationError(f"preset: not used by {command}")
    if command == "stability" and cfg.beta is None:
        cfg.beta = beta_max_semi(cfg.k)
    if command == "compare" and not cfg.grids:
        cfg.grids = (20, 40, 80, 160, 320, 640)
    if not cfg.variants:
        cfg.variants = ("H3", "H_old") if command == "compare" else ("H1", "H2", "H3")
    return cfg
