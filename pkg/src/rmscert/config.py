"""Experiment configuration: JSON schema, validation and resolution.

A config file describes one experiment end to end: the objective, the
parameter tuple, the input schedule, the horizon, the initial state and the
sampling plan of the verification suite.  `resolve` fills every default and
derives component seeds from the top-level seed, so the resolved dict that
gets embedded in output files is fully self-describing and reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .certificate import SamplerConfig
from .core import AlgoParams, State
from .objectives import Objective, objective_from_descriptor
from .schedules import schedule_from_descriptor


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


_DEFAULTS = {
    "params": {"beta": 0.5, "epsilon": 1.0, "eta0": 0.1, "eta1": 0.1},
    "schedule": {"kind": "zero"},
    "steps": 10_000,
    "init": {"kind": "random", "x_range": 10.0, "s_range": 10.0},
    "q": 0.125,
    "sampler": {"n": 10_000, "x_range": 10.0, "s_range": 10.0, "u_max": 10.0,
                "traj_steps": 200},
    "u_levels": [0.0, 0.5, 1.0, 2.0, 5.0],
    "gap_tolerance": 1e-3,
    "tolerance": 1e-9,
}


@dataclass
class ExperimentConfig:
    objective: Objective
    params: AlgoParams
    schedule: object
    steps: int
    init: State
    q: float
    sampler: SamplerConfig
    u_levels: list
    gap_tolerance: float
    resolved: dict  # the fully-resolved JSON-serializable form


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def resolve(raw: dict, seed_override: int | None = None,
            tol_override: float | None = None) -> dict:
    """Fill defaults and derive per-component seeds; returns a plain dict.

    The top-level "seed" feeds any randomized component (initial state,
    random schedule, sampler) that does not carry its own seed; a config that
    uses a randomized component without any seed is rejected.
    """
    _require(isinstance(raw, dict), "config must be a JSON object")
    cfg = {}
    _require("objective" in raw, "config needs an 'objective' entry")
    cfg["objective"] = dict(raw["objective"])

    pr = {**_DEFAULTS["params"], **raw.get("params", {})}
    for k in ("beta", "epsilon", "eta0", "eta1"):
        _require(isinstance(pr.get(k), (int, float)), f"params.{k} must be a number")
    cfg["params"] = pr

    cfg["schedule"] = dict(raw.get("schedule", _DEFAULTS["schedule"]))
    cfg["steps"] = int(raw.get("steps", _DEFAULTS["steps"]))
    _require(cfg["steps"] >= 1, "steps must be >= 1")
    cfg["init"] = dict(raw.get("init", _DEFAULTS["init"]))
    cfg["q"] = float(raw.get("q", _DEFAULTS["q"]))
    _require(0.0 < cfg["q"] < 0.25, "q must lie in (0, 1/4)")
    cfg["sampler"] = {**_DEFAULTS["sampler"], **raw.get("sampler", {})}
    _require(int(cfg["sampler"]["n"]) >= 1, "sampler.n must be >= 1")
    cfg["u_levels"] = [float(v) for v in raw.get("u_levels", _DEFAULTS["u_levels"])]
    _require(all(np.isfinite(v) and v >= 0.0 for v in cfg["u_levels"]),
             "u_levels must be finite and >= 0")
    cfg["gap_tolerance"] = float(raw.get("gap_tolerance", _DEFAULTS["gap_tolerance"]))
    cfg["tolerance"] = float(tol_override if tol_override is not None
                             else raw.get("tolerance", _DEFAULTS["tolerance"]))

    seed = seed_override if seed_override is not None else raw.get("seed")
    if seed is not None:
        cfg["seed"] = int(seed)

    # derive seeds for randomized components; reject seedless randomness
    def derived(component: dict, offset: int, label: str) -> None:
        if "seed" not in component:
            _require(seed is not None,
                     f"{label} is randomized: give it a seed or set a top-level seed")
            component["seed"] = int(seed) + offset

    if "seed" not in cfg["objective"] and "Q" not in cfg["objective"] \
            and "shift" not in cfg["objective"]:
        derived(cfg["objective"], 1, "objective")
    if cfg["init"].get("kind", "random") == "random":
        derived(cfg["init"], 2, "init")
    if cfg["schedule"].get("kind") == "random":
        derived(cfg["schedule"], 3, "schedule")
    derived(cfg["sampler"], 4, "sampler")
    return cfg


def build(resolved: dict) -> ExperimentConfig:
    """Instantiate all components from a resolved config dict."""
    try:
        obj = objective_from_descriptor(resolved["objective"])
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad objective: {e}") from e
    pr = resolved["params"]
    params = AlgoParams(float(pr["beta"]), float(pr["epsilon"]),
                        float(pr["eta0"]), float(pr["eta1"]))
    try:
        schedule = schedule_from_descriptor(resolved["schedule"])
    except (KeyError, ValueError) as e:
        raise ConfigError(f"bad schedule: {e}") from e

    ini = resolved["init"]
    kind = ini.get("kind", "random")
    if kind == "random":
        rng = np.random.default_rng(int(ini["seed"]))
        x = obj.x_star + rng.uniform(-float(ini.get("x_range", 10.0)),
                                     float(ini.get("x_range", 10.0)), obj.d)
        s = rng.uniform(0.0, float(ini.get("s_range", 10.0)), obj.d)
        init = State(x, s)
    elif kind == "explicit":
        try:
            init = State(ini["x"], ini["s"])
        except (KeyError, ValueError) as e:
            raise ConfigError(f"bad explicit init: {e}") from e
    elif kind == "equilibrium":
        init = State(obj.x_star, np.zeros(obj.d))
    else:
        raise ConfigError(f"unknown init kind: {kind!r}")
    if init.d != obj.d:
        raise ConfigError("init dimension does not match objective")

    sm = resolved["sampler"]
    sampler = SamplerConfig(n=int(sm["n"]), x_range=float(sm["x_range"]),
                            s_range=float(sm["s_range"]), u_max=float(sm["u_max"]),
                            seed=int(sm["seed"]), traj_steps=int(sm["traj_steps"]),
                            tol=float(resolved["tolerance"]))
    return ExperimentConfig(objective=obj, params=params, schedule=schedule,
                            steps=int(resolved["steps"]), init=init,
                            q=float(resolved["q"]), sampler=sampler,
                            u_levels=list(resolved["u_levels"]),
                            gap_tolerance=float(resolved["gap_tolerance"]),
                            resolved=resolved)


def load(path, seed_override: int | None = None,
         tol_override: float | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    return build(resolve(raw, seed_override, tol_override))


def to_json(resolved: dict) -> str:
    """Canonical serialization (sorted keys) used when embedding configs."""
    return json.dumps(resolved, sort_keys=True, separators=(",", ":"))
