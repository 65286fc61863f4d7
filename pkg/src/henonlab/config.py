"""Experiment configuration: strict parsing, defaults, canonical hashing.

Configs are JSON.  Unknown keys are rejected, defaults are filled in and
the resulting effective config is what gets persisted and hashed, so the
hash changes exactly when a semantic field changes and never with
formatting.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .maps import HenonMap, map_from_dict, map_to_dict

DEFAULTS = {
    "periods": None,          # required
    "map": None,              # required
    "eps": 0.1,
    "eta": 0.05,
    "sampler_n": 8,
    "budgets": {
        "seeds_per_point": 8,     # census seeds = seeds_per_point * d^n
        "root_budget": 250000,    # sampler multistart seeds per depth
        "slices": 64,
        "moments": 3,
        "horizon": 200,
    },
    "rng_seed": 0,
    "tolerances": {
        "census": 1e-9,
        "green": 1e-10,
        "exact_period": 1e-8,
        "sample_green": 5e-3,
    },
    "output_dir": "runs",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus its canonical dict form."""

    hmap: HenonMap
    periods: tuple[int, ...]
    eps: float
    eta: float
    sampler_n: int
    budgets: dict
    rng_seed: int
    tolerances: dict
    output_dir: str
    effective: dict = field(repr=False)

    def hash(self) -> str:
        return config_hash(self.effective)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_hash(effective: dict) -> str:
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _merge_strict(defaults: dict, given: dict, path: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key '{path}{key}'")
        if isinstance(defaults[key], dict) and defaults[key] is not None:
            if not isinstance(val, dict):
                raise ConfigError(f"config key '{path}{key}' must be an object")
            out[key] = _merge_strict(defaults[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


def from_dict(obj: dict) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    eff = _merge_strict(DEFAULTS, obj)
    if eff["map"] is None:
        raise ConfigError("config key 'map' is required")
    if eff["periods"] is None:
        raise ConfigError("config key 'periods' is required")
    hmap = map_from_dict(eff["map"])
    eff["map"] = map_to_dict(hmap)  # canonical numeric form
    periods = eff["periods"]
    if (not isinstance(periods, list) or not periods
            or any(not isinstance(p, int) or p < 1 for p in periods)
            or sorted(periods) != periods):
        raise ConfigError("'periods' must be a nonempty ascending list of integers >= 1")
    if not 0.0 < float(eff["eps"]) < 1.0:
        raise ConfigError("'eps' must lie in (0, 1)")
    if float(eff["eta"]) <= 0:
        raise ConfigError("'eta' must be positive")
    if int(eff["sampler_n"]) < 1:
        raise ConfigError("'sampler_n' must be >= 1")
    for name, val in eff["tolerances"].items():
        if not val > 0:
            raise ConfigError(f"tolerance '{name}' must be positive")
    for name, val in eff["budgets"].items():
        if not (isinstance(val, int) and val >= 1):
            raise ConfigError(f"budget '{name}' must be a positive integer")
    return ExperimentConfig(
        hmap=hmap,
        periods=tuple(periods),
        eps=float(eff["eps"]),
        eta=float(eff["eta"]),
        sampler_n=int(eff["sampler_n"]),
        budgets=dict(eff["budgets"]),
        rng_seed=int(eff["rng_seed"]),
        tolerances=dict(eff["tolerances"]),
        output_dir=str(eff["output_dir"]),
        effective=eff,
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    return from_dict(obj)


def serialize(cfg: ExperimentConfig) -> str:
    return canonical_json(cfg.effective)
