from __future__ import annotations

import json
import os
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError

DEFAULT_OUT_DIR = "results"
ENV_OUT_DIR = "HOLOLEDGER_OUT_DIR"
EXPERIMENTS = ("evolve", "wick", "paths", "ledger", "mera")
STOCHASTIC_EXPERIMENTS = ("paths", "ledger", "mera")
LEDGER_STATES = ("plus", "zero", "one")


@dataclass
class RunConfig:
    experiment: str = "evolve"
    seed: int | None = None
    out_dir: str = DEFAULT_OUT_DIR
    # units
    m: float = 1.0
    hbar: float = 1.0
    # real-time evolution
    dt: float = 1e-3
    n_steps: int = 1000
    x_min: float = -40.0
    x_max: float = 40.0
    n_points: int = 1024
    x0: float = 0.0
    sigma0: float = 1.0
    p0: float = 1.0
    n_snapshots: int = 5
    # Wick sweep
    tau_values: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
    wick_x_min: float = -5.0
    wick_x_max: float = 5.0
    wick_points: int = 101
    # imaginary-time paths
    tau_step: float = 1e-3
    path_steps: int = 1000
    n_paths: int = 100_000
    n_particles: int = 3
    chunk_size: int = 1000
    workers: int = 1
    histogram_bins: int = 50
    # ledger
    schedule: str = "U:0:1,M:1:2,U:2:3"
    ledger_state: str = "plus"
    # holographic network
    n_leaves: int = 64
    interval_lengths: tuple[int, ...] = (2, 4, 8, 16)
    n_events: int = 1000

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data


_FIELD_DEFAULTS = {f.name: f.default for f in fields(RunConfig)}
_INT_FIELDS = {
    name for name, default in _FIELD_DEFAULTS.items() if isinstance(default, int)
} | {"seed"}
_FLOAT_TUPLES = {"tau_values"}
_INT_TUPLES = {"interval_lengths"}


def _coerce(key: str, raw: Any) -> Any:
    if key not in _FIELD_DEFAULTS:
        raise ConfigError(f"Unknown config key: {key!r}")
    try:
        if key in _FLOAT_TUPLES or key in _INT_TUPLES:
            cast = int if key in _INT_TUPLES else float
            items = raw.split(",") if isinstance(raw, str) else list(raw)
            return tuple(cast(item) for item in items if str(item).strip())
        if key == "seed" and (raw is None or raw == ""):
            return None
        if key in _INT_FIELDS:
            if isinstance(raw, float) and not raw.is_integer():
                raise ValueError(f"{raw} is not an integer")
            return int(raw)
        if isinstance(_FIELD_DEFAULTS[key], float):
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Bad value for {key!r}: {raw!r} ({exc})") from exc


def apply_overrides(config: RunConfig, values: Mapping[str, Any]) -> RunConfig:
    return replace(config, **{key: _coerce(key, value) for key, value in values.items()})


def parse_assignments(lines: Iterable[str]) -> dict[str, str]:
    """Parse `key=value` lines; blank lines and `#` comments are skipped."""
    out: dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"Line {number}: expected key=value, got {line.strip()!r}")
        key, value = (part.strip() for part in text.split("=", 1))
        out[key] = value
    return out


def load_config(path: Path | str) -> RunConfig:
    """Read a JSON object or a key=value file into a RunConfig."""
    target = Path(path)
    if not target.exists():
        raise ConfigError(f"Config file not found: {target}")
    text = target.read_text(encoding="utf-8")
    if target.suffix == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Invalid JSON in {target}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{target} must hold a JSON object")
        return apply_overrides(RunConfig(), raw)
    return apply_overrides(RunConfig(), parse_assignments(text.splitlines()))


def save_config(config: RunConfig, path: Path | str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2)
    return target


def resolve_config(
    experiment: str,
    path: Path | str | None = None,
    sets: Iterable[str] = (),
    seed: int | None = None,
    out_dir: str | None = None,
) -> RunConfig:
    """Defaults, then the file, then the environment, then command-line flags."""
    config = load_config(path) if path else RunConfig()
    config = replace(config, experiment=experiment)
    env_out = os.getenv(ENV_OUT_DIR)
    if env_out:
        config = replace(config, out_dir=env_out)
    config = apply_overrides(config, parse_assignments(sets))
    if seed is not None:
        config = replace(config, seed=seed)
    if out_dir is not None:
        config = replace(config, out_dir=out_dir)
    return config


def _power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def parse_schedule(text: str) -> list[tuple[str, float, float]]:
    """`U:0:1,M:1:2` -> [("U", 0.0, 1.0), ("M", 1.0, 2.0)]."""
    segments: list[tuple[str, float, float]] = []
    for chunk in (c.strip() for c in text.split(",")):
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3 or parts[0] not in ("U", "M"):
            raise ConfigError(f"Bad schedule segment {chunk!r}; expected U|M:start:end")
        try:
            start, end = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ConfigError(f"Bad schedule times in {chunk!r}") from exc
        segments.append((parts[0], start, end))
    return segments


def validate(config: RunConfig) -> RunConfig:
    if config.experiment not in EXPERIMENTS:
        raise ConfigError(f"Unknown experiment {config.experiment!r}; choose from {EXPERIMENTS}")
    for name in ("m", "hbar", "dt", "tau_step", "sigma0"):
        value = getattr(config, name)
        if not value > 0:
            raise ConfigError(f"{name} must be positive, got {value}")
    if config.n_points < 8 or not _power_of_two(config.n_points):
        raise ConfigError(f"n_points must be a power of two >= 8, got {config.n_points}")
    if not config.x_max > config.x_min:
        raise ConfigError(f"x_max must exceed x_min, got [{config.x_min}, {config.x_max}]")
    if not config.wick_x_max > config.wick_x_min or config.wick_points < 1:
        raise ConfigError("Wick sweep needs wick_x_max > wick_x_min and wick_points >= 1")
    if config.n_steps < 0 or config.n_snapshots < 1:
        raise ConfigError("n_steps must be >= 0 and n_snapshots >= 1")
    if not config.tau_values:
        raise ConfigError("tau_values must list at least one imaginary time")
    if any(not tau > 0 for tau in config.tau_values):
        raise ConfigError(f"tau_values must all be positive, got {config.tau_values}")
    for name in ("path_steps", "n_paths", "n_particles", "chunk_size", "workers", "histogram_bins"):
        if getattr(config, name) < 1:
            raise ConfigError(f"{name} must be >= 1, got {getattr(config, name)}")
    if config.n_leaves < 4 or not _power_of_two(config.n_leaves):
        raise ConfigError(f"n_leaves must be a power of two >= 4, got {config.n_leaves}")
    if config.experiment == "mera" and any(
        ell < 1 or ell > config.n_leaves for ell in config.interval_lengths
    ):
        raise ConfigError(f"interval_lengths must lie in [1, {config.n_leaves}]")
    if config.n_events < 0:
        raise ConfigError(f"n_events must be >= 0, got {config.n_events}")
    if config.ledger_state not in LEDGER_STATES:
        raise ConfigError(f"ledger_state must be one of {LEDGER_STATES}")
    parse_schedule(config.schedule)
    if config.experiment in STOCHASTIC_EXPERIMENTS and config.seed is None:
        raise ConfigError(f"Experiment {config.experiment!r} is stochastic; pass --seed")
    return config
