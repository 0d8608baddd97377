"""Run configuration: JSON schema, validation and initial-data presets."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Optional

import numpy as np

from .algebra import CocycleVariant
from .dynamics import FORMULATIONS, State, smooth_default
from .spectral import PeriodicGrid, RandomFieldSpec, random_field

COMMANDS = ("simulate", "verify", "lax", "sweep")
PRESETS = ("smooth-default", "muhs-reduction", "random")
REQUIRED_IN_FILE = ("n", "dt", "t_end")
SWEEP_KEYS = ("gamma", "lambda", "n")
SPEC_KEYS = ("seed", "k_max", "amplitude", "mean", "decay")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str = "simulate"
    n: int = 128
    dt: float = 1e-3
    t_end: float = 1.0
    gamma: tuple = (0.0, 0.0, 0.0)
    initial: Any = "smooth-default"
    formulation: str = "direct"
    c1: float = 1.0
    c2: float = 0.0
    lambdas: tuple = (0.5, 1.0, 2.0)
    cadence: int = 10
    snapshot_times: Optional[tuple] = None
    monitor_discrepancy: bool = True
    sweep: Optional[dict] = None
    out: str = "out"
    seed: int = 42

    def __post_init__(self):
        validate(self)

    # JSON ---------------------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["gamma"] = list(self.gamma)
        d["lambdas"] = list(self.lambdas)
        if self.snapshot_times is not None:
            d["snapshot_times"] = list(self.snapshot_times)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict, require: tuple = ()) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = [k for k in require if k not in data]
        if missing:
            raise ConfigError(f"missing required config keys: {', '.join(missing)}")
        data = dict(data)
        for key in ("gamma", "lambdas", "snapshot_times"):
            if isinstance(data.get(key), list):
                data[key] = tuple(data[key])
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str, require: tuple = REQUIRED_IN_FILE) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data, require)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        return cls.from_json(text)

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    # derived objects ----------------------------------------------------
    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.n)

    @property
    def variant(self) -> CocycleVariant:
        if self.c1 == 1.0 and self.c2 == 0.0:
            return CocycleVariant()
        return CocycleVariant("modified", self.c1, self.c2)

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def snapshot_steps(self) -> list[int]:
        times = self.snapshot_times if self.snapshot_times is not None else (0.0, self.t_end)
        return sorted({int(round(t / self.dt)) for t in times})

    def initial_state(self) -> State:
        return build_initial_state(self.initial, self.grid, self.gamma, self.seed)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_spec(spec, label: str) -> None:
    if not isinstance(spec, dict):
        raise ConfigError(f"initial.{label} must be an object")
    unknown = sorted(set(spec) - set(SPEC_KEYS))
    if unknown:
        raise ConfigError(f"unknown keys in initial.{label}: {', '.join(unknown)}")
    if "k_max" not in spec:
        raise ConfigError(f"initial.{label} needs k_max")


def validate(cfg: RunConfig) -> None:
    def fail(msg):
        raise ConfigError(msg)

    if cfg.command not in COMMANDS:
        fail(f"command must be one of {COMMANDS}")
    if not isinstance(cfg.n, int) or isinstance(cfg.n, bool):
        fail("n must be an integer")
    if cfg.n < 8 or cfg.n & (cfg.n - 1):
        fail("n must be a power of two >= 8")
    if not _is_number(cfg.dt) or not cfg.dt > 0:
        fail("dt must be a positive number")
    if not _is_number(cfg.t_end) or not cfg.t_end > 0:
        fail("t_end must be a positive number")
    if abs(cfg.t_end / cfg.dt - round(cfg.t_end / cfg.dt)) > 1e-9 * cfg.t_end / cfg.dt:
        fail("t_end must be an integer multiple of dt")
    if len(cfg.gamma) != 3 or not all(_is_number(g) for g in cfg.gamma):
        fail("gamma must be a list of three numbers")
    if cfg.formulation not in FORMULATIONS:
        fail(f"formulation must be one of {FORMULATIONS}")
    if not (_is_number(cfg.c1) and _is_number(cfg.c2)):
        fail("c1 and c2 must be numbers")
    if not cfg.lambdas or not all(_is_number(x) and x != 0 for x in cfg.lambdas):
        fail("lambdas must be a non-empty list of nonzero real numbers")
    if not isinstance(cfg.cadence, int) or cfg.cadence < 1:
        fail("cadence must be a positive integer")
    if not isinstance(cfg.seed, int) or isinstance(cfg.seed, bool) or cfg.seed < 0:
        fail("seed must be a non-negative integer")
    if not isinstance(cfg.out, str) or not cfg.out:
        fail("out must be a non-empty path")
    if cfg.snapshot_times is not None:
        for t in cfg.snapshot_times:
            if not _is_number(t) or t < 0 or t > cfg.t_end * (1 + 1e-12):
                fail("snapshot_times must lie in [0, t_end]")
            k = t / cfg.dt
            if abs(k - round(k)) > 1e-9 * max(1.0, k):
                fail(f"snapshot time {t} is not a multiple of dt")
    if isinstance(cfg.initial, str):
        if cfg.initial not in PRESETS:
            fail(f"initial preset must be one of {PRESETS}")
    elif isinstance(cfg.initial, dict):
        if set(cfg.initial) != {"f", "v"}:
            fail("initial object must have exactly the keys f and v")
        for label in ("f", "v"):
            _check_spec(cfg.initial[label], label)
            if 6 * cfg.initial[label]["k_max"] > cfg.n:
                fail(f"initial.{label}.k_max too large for n = {cfg.n}")
    else:
        fail("initial must be a preset name or an object with f and v specs")
    if cfg.sweep is not None:
        if not isinstance(cfg.sweep, dict) or not cfg.sweep:
            fail("sweep must be a non-empty object")
        unknown = sorted(set(cfg.sweep) - set(SWEEP_KEYS))
        if unknown:
            fail(f"unknown sweep keys: {', '.join(unknown)}")
        for key, values in cfg.sweep.items():
            if not isinstance(values, list) or not values:
                fail(f"sweep.{key} must be a non-empty list")


def build_initial_state(initial, grid: PeriodicGrid, gamma, seed: int) -> State:
    if isinstance(initial, dict):
        f = random_field(RandomFieldSpec(**initial["f"]), grid)
        v = random_field(RandomFieldSpec(**initial["v"]), grid)
        return State(f, v, gamma)
    if initial == "smooth-default":
        return smooth_default(grid, gamma)
    if initial == "muhs-reduction":
        f = grid.field(lambda x: 1.0 + 0.1 * np.cos(2 * np.pi * x))
        return State(f, grid.zeros(), gamma)
    if initial == "random":
        k_max = min(8, grid.n // 6)
        f = random_field(RandomFieldSpec(seed, k_max, amplitude=0.1, mean=1.0), grid)
        v = random_field(RandomFieldSpec(seed + 1, k_max, amplitude=0.05), grid)
        return State(f, v, gamma)
    raise ConfigError(f"unknown initial preset {initial!r}")
