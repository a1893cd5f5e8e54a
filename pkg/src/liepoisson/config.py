"""Run configuration: JSON loading, defaults, validation."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigParseError

DEFAULT_SEED = 20240801

DEFAULT_TOLERANCES = {
    "jacobi_tol": 1e-4,
    "drift_tol": 1e-7,
    "rank_tol": 1e-9,
}

# A self-contained default: so3 hedgehog run with a charge-carrying state.
DEFAULT_CONFIG = {
    "algebra": "so3",
    "potential": {"kind": "hedgehog", "kappa": 0.2},
    "f_spec": None,
    "initial_state": {
        "q": [0.3, -0.1, 0.2],
        "p": [0.4, 0.3, -0.2],
        "I": [0.5, 0.1, 0.7],
    },
    "dt": 1e-3,
    "steps": 2000,
    "seed": DEFAULT_SEED,
    "out_dir": ".",
}


@dataclass
class RunConfig:
    algebra: object = "so3"
    potential: dict | None = None
    f_spec: object = None
    initial_state: dict | None = None
    dt: float = 1e-3
    steps: int = 2000
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = DEFAULT_SEED
    out_dir: str = "."


def _validate(cfg: RunConfig) -> RunConfig:
    for name, value in cfg.tolerances.items():
        if not (isinstance(value, (int, float)) and value > 0):
            raise ConfigParseError(f"tolerance {name!r} must be positive, got {value!r}")
    if not (cfg.dt > 0 and math.isfinite(cfg.dt)):
        raise ConfigParseError(f"dt must be positive and finite, got {cfg.dt!r}")
    if not (isinstance(cfg.steps, int) and cfg.steps >= 1):
        raise ConfigParseError(f"steps must be a positive integer, got {cfg.steps!r}")
    if not math.isfinite(cfg.dt * cfg.steps):
        raise ConfigParseError("dt * steps is not finite")
    return cfg


def load_config(path: str | None) -> RunConfig:
    """Load a RunConfig from JSON; ``None`` yields the built-in default."""
    data = dict(DEFAULT_CONFIG)
    if path is not None:
        if not os.path.exists(path):
            raise ConfigParseError(f"config file not found: {path}")
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigParseError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigParseError("config root must be a JSON object")
        data.update(user)
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(data.get("tolerances", {}))
    cfg = RunConfig(
        algebra=data.get("algebra", "so3"),
        potential=data.get("potential"),
        f_spec=data.get("f_spec"),
        initial_state=data.get("initial_state"),
        dt=float(data.get("dt", 1e-3)),
        steps=int(data.get("steps", 2000)),
        tolerances=tols,
        seed=int(data.get("seed", DEFAULT_SEED)),
        out_dir=str(data.get("out_dir", ".")),
    )
    return _validate(cfg)
