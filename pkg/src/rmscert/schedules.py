"""Bounded nonnegative step-size input schedules u(t).

Every schedule is an immutable object with a `value(t)` method returning a
float in [0, u_max] and a declared supremum `u_max`.  Schedules are pure:
`value` depends only on t (and fixed fields), so trajectories can be replayed
or evaluated out of order.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

_MASK = (1 << 64) - 1


def _hash01(seed: int, t: int) -> float:
    """Counter-based uniform in [0, 1): splitmix64 finalizer keyed by (seed, t)."""
    z = (int(seed) + (int(t) + 1) * 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    z = z ^ (z >> 31)
    return (z >> 11) * 2.0**-53


def _check_t(t: int) -> int:
    t = int(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    return t


@dataclass(frozen=True)
class Zero:
    u_max: float = 0.0

    def value(self, t: int) -> float:
        _check_t(t)
        return 0.0

    def descriptor(self) -> dict:
        return {"kind": "zero"}


@dataclass(frozen=True)
class Constant:
    level: float

    def __post_init__(self):
        if not self.level >= 0.0:
            raise ValueError("level must be >= 0")

    @property
    def u_max(self) -> float:
        return self.level

    def value(self, t: int) -> float:
        _check_t(t)
        return self.level

    def descriptor(self) -> dict:
        return {"kind": "constant", "level": self.level}


@dataclass(frozen=True)
class StepDecay:
    level: float
    interval: int
    factor: float

    def __post_init__(self):
        if not self.level >= 0.0:
            raise ValueError("level must be >= 0")
        if int(self.interval) < 1:
            raise ValueError("interval must be >= 1")
        if not (0.0 < self.factor <= 1.0):
            raise ValueError("factor must be in (0, 1]")

    @property
    def u_max(self) -> float:
        return self.level

    def value(self, t: int) -> float:
        t = _check_t(t)
        return self.level * self.factor ** (t // int(self.interval))

    def descriptor(self) -> dict:
        return {"kind": "step_decay", "level": self.level,
                "interval": int(self.interval), "factor": self.factor}


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    period: float

    def __post_init__(self):
        if not self.amplitude >= 0.0:
            raise ValueError("amplitude must be >= 0")
        if not self.period > 0.0:
            raise ValueError("period must be > 0")

    @property
    def u_max(self) -> float:
        return self.amplitude

    def value(self, t: int) -> float:
        import math
        t = _check_t(t)
        # raised cosine keeps the value in [0, amplitude] and starts at 0
        v = 0.5 * self.amplitude * (1.0 - math.cos(2.0 * math.pi * t / self.period))
        return min(max(v, 0.0), self.amplitude)

    def descriptor(self) -> dict:
        return {"kind": "sinusoid", "amplitude": self.amplitude, "period": self.period}


@dataclass(frozen=True)
class RandomBounded:
    """Uniform draws in [0, u_max], random-access by construction.

    The draw at time t is a pure hash of (seed, t), so value(t) does not
    depend on evaluation order and replays identically across workers.
    """

    u_max: float
    seed: int

    def __post_init__(self):
        if not self.u_max >= 0.0:
            raise ValueError("u_max must be >= 0")

    def value(self, t: int) -> float:
        t = _check_t(t)
        return self.u_max * _hash01(self.seed, t)

    def descriptor(self) -> dict:
        return {"kind": "random", "u_max": self.u_max, "seed": int(self.seed)}


@dataclass(frozen=True)
class PiecewiseAdversarial:
    """Piecewise-constant schedule switching levels at given times.

    levels[k] is active for t in [switch_times[k-1], switch_times[k]); the
    typical stress pattern alternates 0 and u_max.
    """

    levels: tuple
    switch_times: tuple

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        times = tuple(int(t) for t in self.switch_times)
        if len(levels) != len(times) + 1:
            raise ValueError("need len(levels) == len(switch_times) + 1")
        if any(v < 0.0 for v in levels):
            raise ValueError("levels must be >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("switch_times must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "switch_times", times)

    @property
    def u_max(self) -> float:
        return max(self.levels)

    def value(self, t: int) -> float:
        t = _check_t(t)
        return self.levels[bisect_right(self.switch_times, t)]

    def descriptor(self) -> dict:
        return {"kind": "adversarial", "levels": list(self.levels),
                "switch_times": list(self.switch_times)}


def schedule_from_descriptor(desc: dict):
    kind = desc.get("kind")
    if kind == "zero":
        return Zero()
    if kind == "constant":
        return Constant(float(desc["level"]))
    if kind == "step_decay":
        return StepDecay(float(desc["level"]), int(desc["interval"]), float(desc["factor"]))
    if kind == "sinusoid":
        return Sinusoid(float(desc["amplitude"]), float(desc["period"]))
    if kind == "random":
        return RandomBounded(float(desc["u_max"]), int(desc["seed"]))
    if kind == "adversarial":
        return PiecewiseAdversarial(tuple(desc["levels"]), tuple(desc["switch_times"]))
    raise ValueError(f"unknown schedule kind: {kind!r}")


def schedule_catalog(u_max: float = 10.0, seed: int = 0, horizon: int = 100_000) -> list:
    """One instance of every schedule kind, all bounded by u_max."""
    return [
        Zero(),
        Constant(0.5 * u_max),
        StepDecay(u_max, interval=max(1, horizon // 20), factor=0.5),
        Sinusoid(u_max, period=max(2.0, horizon / 50)),
        RandomBounded(u_max, seed=seed),
        PiecewiseAdversarial((0.0, u_max, 0.0, u_max),
                             tuple(int(horizon * f) for f in (0.25, 0.5, 0.75))),
    ]
