"""Experiment configuration: flat TOML with unit-suffixed quantities.

Example::

    mass = "29.93e-27 kg"
    omega = "20 kHz"          # cyclic frequency, stored as 2*pi*f
    beta = "1e6 m^-2"
    d = "370 um"
    t_f_min = "20 us"
    t_f_max = "200 us"
    count = 10
    methods = ["classical", "quantum1d"]
    variants = ["unshifted"]
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .core import BE9_PAIR_MASS, COULOMB, HBAR, TrapParams

METHODS = ("perturbation", "classical", "quantum1d", "quantum2d", "nion")
VARIANTS = ("unshifted", "shifted", "compensated")


class ConfigError(ValueError):
    pass


_UNITS = {
    "mass": {"kg": 1.0, "g": 1e-3, "u": 1.66053906660e-27, "amu": 1.66053906660e-27},
    "frequency": {"Hz": 2 * math.pi, "kHz": 2e3 * math.pi, "MHz": 2e6 * math.pi,
                  "GHz": 2e9 * math.pi, "rad/s": 1.0},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "μm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "μs": 1e-6, "ns": 1e-9},
    "inverse_area": {"m^-2": 1.0, "1/m^2": 1.0, "mm^-2": 1e6, "um^-2": 1e12, "µm^-2": 1e12},
    "dimensionless": {"": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(value, kind: str) -> float:
    """SI value of ``value`` ("20 kHz", "370 um", or a bare SI number)."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a {kind} quantity, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a {kind} quantity, got {value!r}")
    match = _QUANTITY.match(value)
    if not match:
        raise ConfigError(f"cannot parse quantity {value!r}")
    number, unit = match.groups()
    table = _UNITS[kind]
    if unit not in table:
        if unit == "":
            return float(number)
        raise ConfigError(f"unit {unit!r} is not a {kind} unit (choose from {sorted(table)})")
    return float(number) * table[unit]


@dataclass(frozen=True)
class ExperimentConfig:
    params: TrapParams
    t_f_min: float
    t_f_max: float
    count: int
    methods: tuple[str, ...]
    variants: tuple[str, ...] = ("unshifted",)
    chain_sizes: tuple[int, ...] = (3,)
    grid_1d: int = 1024
    grid_2d: tuple[int, int] = (512, 256)
    steps_per_period: int = 500
    workers: int = 1
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("sweep count must be at least 1")
        if not (self.t_f_min > 0 and self.t_f_max > 0):
            raise ConfigError("final times must be positive")
        if self.t_f_max < self.t_f_min:
            raise ConfigError("t_f_max must not be below t_f_min")
        if not self.methods:
            raise ConfigError("method list must not be empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r} (choose from {METHODS})")
        if not self.variants:
            raise ConfigError("variant list must not be empty")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigError(f"unknown variant {v!r} (choose from {VARIANTS})")
        if any(n < 2 for n in self.chain_sizes):
            raise ConfigError("chain sizes must be at least 2")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def t_f_values(self) -> list[float]:
        if self.count == 1:
            return [self.t_f_min]
        step = (self.t_f_max - self.t_f_min) / (self.count - 1)
        return [self.t_f_min + i * step for i in range(self.count)]


_KNOWN = {"mass", "omega", "beta", "d", "Cc", "hbar", "t_f_min", "t_f_max", "count", "methods",
          "variants", "chain_sizes", "grid_1d", "grid_2d", "steps_per_period", "workers", "seed"}


def config_from_mapping(raw: dict) -> ExperimentConfig:
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    try:
        params = TrapParams(
            M=parse_quantity(raw.get("mass", BE9_PAIR_MASS), "mass"),
            omega=parse_quantity(raw["omega"], "frequency"),
            beta=parse_quantity(raw.get("beta", 0.0), "inverse_area"),
            d=parse_quantity(raw.get("d", 0.0), "length"),
            Cc=float(raw.get("Cc", COULOMB)),
            hbar=float(raw.get("hbar", HBAR)),
        )
        return ExperimentConfig(
            params=params,
            t_f_min=parse_quantity(raw["t_f_min"], "time"),
            t_f_max=parse_quantity(raw.get("t_f_max", raw["t_f_min"]), "time"),
            count=int(raw.get("count", 1)),
            methods=tuple(raw.get("methods", ())),
            variants=tuple(raw.get("variants", ("unshifted",))),
            chain_sizes=tuple(int(n) for n in raw.get("chain_sizes", (3,))),
            grid_1d=int(raw.get("grid_1d", 1024)),
            grid_2d=tuple(int(n) for n in raw.get("grid_2d", (512, 256))),
            steps_per_period=int(raw.get("steps_per_period", 500)),
            workers=int(raw.get("workers", 1)),
            seed=int(raw.get("seed", 0)),
        )
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc.args[0]!r}") from None
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from None
    return config_from_mapping(raw)
