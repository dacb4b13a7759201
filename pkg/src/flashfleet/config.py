"""Run configuration: parsing, validation, canonical hashing.

A RunConfig captures everything that determines a run's output. Its
canonical form feeds a sha256 digest that is stamped into every report,
so two outputs are comparable exactly when their hashes match.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional

from ._util import as_fraction, sha256_hex
from .errors import ConfigError
from .experiments import STRATEGIES
from .gridgen import DEMAND_LEVELS
from .pooling import PoolingParams

__all__ = ["RunConfig", "load_config", "parse_overrides"]


def _parse_int(value):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigError(f"expected an integer, got {value!r}")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}") from None


def _parse_optional_int(value):
    if value is None or (isinstance(value, str)
                         and value.strip().lower() in ("", "none")):
        return None
    return _parse_int(value)


def _parse_fraction(value):
    try:
        frac = as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"expected a number, got {value!r}") from None
    return frac


def _parse_bool(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        low = value.strip().lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
    raise ConfigError(f"expected true or false, got {value!r}")


def _parse_str(value):
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}")
    return value


@dataclass(frozen=True)
class RunConfig:
    # scenario
    grid_width: int = 6
    grid_height: int = 6
    edge_base_time_s: int = 50
    num_stores: int = 4
    demand_level: str = "medium"
    horizon_windows: int = 12
    window_length_s: int = 3600
    demand_share: Fraction = Fraction(1, 2)
    seed: int = 42
    # engine
    snapshot_period_s: int = 100
    capacity: int = 4
    max_delay_s: int = 300
    t_load_s: int = 60
    t_deliver_s: int = 60
    alpha: Fraction = Fraction(1)
    max_routes_per_vehicle: int = 200
    max_requests_per_route: Optional[int] = None
    # strategies
    strategy: str = "proposed"
    m_fix_s: int = 2000
    encouraged_penalty_s: int = 1000
    fixed_fleet: int = 10
    hierarchical: bool = True
    chain_interval_s: int = 3600

    def __post_init__(self):
        if self.demand_level not in DEMAND_LEVELS:
            raise ConfigError(
                f"unknown demand_level {self.demand_level!r}; expected "
                f"one of {', '.join(sorted(DEMAND_LEVELS))}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(
                f"unknown strategy {self.strategy!r}; expected one of "
                f"{', '.join(STRATEGIES)}")
        positives = (
            ("grid_width", self.grid_width),
            ("grid_height", self.grid_height),
            ("edge_base_time_s", self.edge_base_time_s),
            ("num_stores", self.num_stores),
            ("horizon_windows", self.horizon_windows),
            ("window_length_s", self.window_length_s),
            ("fixed_fleet", self.fixed_fleet),
            ("chain_interval_s", self.chain_interval_s),
        )
        for name, value in positives:
            if value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.demand_share < 0:
            raise ConfigError("demand_share must be non-negative")
        if self.m_fix_s < 0 or self.encouraged_penalty_s < 0:
            raise ConfigError("vehicle cost terms must be non-negative")
        self.engine_params()  # engine-side bounds checked here

    def engine_params(self, *, penalty_s: int = 0) -> PoolingParams:
        try:
            return PoolingParams(
                snapshot_period_s=self.snapshot_period_s,
                capacity=self.capacity,
                max_delay_s=self.max_delay_s,
                t_load_s=self.t_load_s,
                t_deliver_s=self.t_deliver_s,
                alpha=self.alpha,
                new_vehicle_penalty_s=penalty_s,
                max_routes_per_vehicle=self.max_routes_per_vehicle,
                max_requests_per_route=self.max_requests_per_route,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_mapping(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Fraction):
                value = (str(value.numerator) if value.denominator == 1
                         else f"{value.numerator}/{value.denominator}")
            out[f.name] = value
        return out

    def config_hash(self) -> str:
        lines = [f"{k}={v}" for k, v in sorted(self.to_mapping().items())]
        return sha256_hex(["\n".join(lines).encode("ascii")])

    def with_overrides(self, pairs) -> "RunConfig":
        """Apply key=value strings on top of this config."""
        updates = {}
        for key, raw in pairs:
            if key not in _PARSERS:
                raise ConfigError(f"unknown config key {key!r}")
            updates[key] = _PARSERS[key](raw)
        try:
            return replace(self, **updates)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


_PARSERS = {}
for _f in fields(RunConfig):
    if _f.name in ("demand_share", "alpha"):
        _PARSERS[_f.name] = _parse_fraction
    elif _f.name in ("demand_level", "strategy"):
        _PARSERS[_f.name] = _parse_str
    elif _f.name == "hierarchical":
        _PARSERS[_f.name] = _parse_bool
    elif _f.name == "max_requests_per_route":
        _PARSERS[_f.name] = _parse_optional_int
    else:
        _PARSERS[_f.name] = _parse_int


def load_config(path: Optional[str] = None, overrides=()) -> RunConfig:
    """Build a RunConfig from an optional JSON file plus overrides."""
    data = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: "
                              f"{exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    updates = {}
    for key, value in data.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        updates[key] = _PARSERS[key](value)
    try:
        cfg = RunConfig(**updates)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg


def parse_overrides(items):
    """Split raw --set arguments of the form key=value."""
    pairs = []
    for item in items:
        if "=" not in item:
            raise ConfigError(
                f"override {item!r} must look like key=value")
        key, _, value = item.partition("=")
        pairs.append((key.strip(), value.strip()))
    return pairs
