"""Flat ``key = value`` run configuration.

Example::

    # oscillator
    a = 0.5
    b = 0
    c = 0
    mu = 1
    dim = 3
    channels = 0,0; 1,0; 0,1
    format = table

Channels are ``n,l`` pairs (or ``n,l,N`` to override ``dim``). Fitting adds
``m1``/``m2`` (mu then defaults to the reduced mass), ``observations =
n,l,mass; ...``, ``free = a,b`` and optional ``bounds_a = lo,hi`` lines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import Channel, PotentialParams
from .quarkonium import QuarkSystem, reduced_mass

FORMATS = ("table", "csv", "json-lines")
DEFAULT_BOUNDS = {"a": (1e-4, 10.0), "b": (0.0, 10.0), "c": (-10.0, 10.0)}
_KNOWN = {
    "a", "b", "c", "mu", "m1", "m2", "dim", "channels", "format", "seed",
    "grid_steps", "rmax", "label", "observations", "free",
    "bounds_a", "bounds_b", "bounds_c",
}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


@dataclass
class RunConfig:
    potential: PotentialParams
    channels: list[Channel]
    format: str = "table"
    seed: int = 0
    grid_steps: Optional[int] = None
    rmax: Optional[float] = None
    m1: Optional[float] = None
    m2: Optional[float] = None
    label: str = ""
    observations: list[tuple[Channel, float]] = field(default_factory=list)
    free: tuple[str, ...] = ("a", "b")
    bounds: dict[str, tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_BOUNDS))

    def __post_init__(self) -> None:
        if not self.channels:
            raise ConfigError("at least one channel is required")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")

    def quark_system(self) -> QuarkSystem:
        if self.m1 is None or self.m2 is None:
            raise ConfigError("fitting needs quark masses m1 and m2")
        return QuarkSystem(self.m1, self.m2, self.potential, self.label)


def parse_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower().replace("-", "_")
        if key not in _KNOWN:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _float(entries: dict[str, str], key: str, default: Optional[float] = None) -> Optional[float]:
    if key not in entries:
        return default
    try:
        value = float(entries[key])
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {entries[key]!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}") from None


def _records(text: str) -> list[list[str]]:
    return [[f.strip() for f in rec.split(",")] for rec in text.split(";") if rec.strip()]


def parse_channel(text: str, dim: int) -> Channel:
    fields = [f.strip() for f in text.split(",")]
    if len(fields) not in (2, 3):
        raise ConfigError(f"channel must be n,l or n,l,N, got {text!r}")
    values = [_int(f, "channel entry") for f in fields]
    try:
        return Channel(values[0], values[1], values[2] if len(values) == 3 else dim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_config(entries: dict[str, str]) -> RunConfig:
    dim = _int(entries.get("dim", "3"), "dim")
    m1, m2 = _float(entries, "m1"), _float(entries, "m2")
    mu = _float(entries, "mu")
    if mu is None:
        if m1 is None or m2 is None:
            raise ConfigError("give mu, or both quark masses m1 and m2")
        if m1 <= 0 or m2 <= 0:
            raise ConfigError("quark masses must be positive")
        mu = reduced_mass(m1, m2)
    elif m1 is not None and m2 is not None and not math.isclose(mu, reduced_mass(m1, m2), rel_tol=1e-12):
        raise ConfigError(f"mu = {mu} disagrees with the reduced mass of m1, m2")
    if "a" not in entries:
        raise ConfigError("missing required key 'a'")
    try:
        potential = PotentialParams(_float(entries, "a"), _float(entries, "b", 0.0), _float(entries, "c", 0.0), mu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    channels = [parse_channel(",".join(rec), dim) for rec in _records(entries.get("channels", ""))]
    observations = []
    for rec in _records(entries.get("observations", "")):
        if len(rec) != 3:
            raise ConfigError(f"observation must be n,l,mass, got {','.join(rec)!r}")
        mass = _float({"mass": rec[2]}, "mass")
        observations.append((parse_channel(",".join(rec[:2]), dim), mass))
    if not channels and observations:
        channels = [ch for ch, _ in observations]

    free = tuple(f.strip() for f in entries.get("free", "a,b").split(",") if f.strip())
    bounds = dict(DEFAULT_BOUNDS)
    for name in ("a", "b", "c"):
        key = f"bounds_{name}"
        if key in entries:
            parts = entries[key].split(",")
            if len(parts) != 2:
                raise ConfigError(f"{key} must be lo,hi")
            bounds[name] = (_float({key: parts[0]}, key), _float({key: parts[1]}, key))

    steps = entries.get("grid_steps")
    return RunConfig(
        potential=potential,
        channels=channels,
        format=entries.get("format", "table"),
        seed=_int(entries.get("seed", "0"), "seed"),
        grid_steps=None if steps is None else _int(steps, "grid_steps"),
        rmax=_float(entries, "rmax"),
        m1=m1,
        m2=m2,
        label=entries.get("label", ""),
        observations=observations,
        free=free,
        bounds=bounds,
    )


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return build_config(parse_text(text))
