"""Shared domain types, parameter validation and norms.

Everything here is a plain immutable value object.  Step-size inputs u are
represented as nonnegative floats (validated by :func:`as_step_input`) rather
than a wrapper class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# s entries in [-S_CLAMP, 0) are rounded to exactly 0; anything below is rejected.
S_CLAMP = 1e-15


class PreconditionError(ValueError):
    """A hypothesis of the convergence/certificate theory is violated."""

    def __init__(self, condition: str, message: str = ""):
        self.condition = condition
        super().__init__(message or f"precondition violated: {condition}")


class DivergenceError(RuntimeError):
    """Trajectory left the guard region (or became non-finite)."""

    def __init__(self, step: int, trace=None):
        self.step = step
        self.trace = trace
        super().__init__(f"divergence guard tripped at step {step}")


@dataclass(frozen=True)
class AlgoParams:
    """Parameters (beta, epsilon, eta0, eta1) of the adaptive iteration.

    The record itself accepts any floats; use :func:`validate_params` to test
    the admissibility conditions, including the step-size bound against a
    smoothness constant L.
    """

    beta: float
    epsilon: float
    eta0: float
    eta1: float


def validate_params(p: AlgoParams, L: float) -> str | None:
    """Return None if p is admissible for smoothness constant L.

    Otherwise return the name of the first violated condition, one of
    "beta", "epsilon", "eta0", "eta1", "eta0+eta1".  Checks, in order:
    0 < beta < 1, epsilon > 0, eta0 > 0, eta1 > 0 and
    eta0 + eta1 < 2*epsilon/L (all fields finite).

    Raises ValueError for non-positive L.
    """
    if not (L > 0.0) or not np.isfinite(L):
        raise ValueError("L must be positive and finite")
    if not (0.0 < p.beta < 1.0) or not np.isfinite(p.beta):
        return "beta"
    if not (p.epsilon > 0.0) or not np.isfinite(p.epsilon):
        return "epsilon"
    if not (p.eta0 > 0.0) or not np.isfinite(p.eta0):
        return "eta0"
    if not (p.eta1 > 0.0) or not np.isfinite(p.eta1):
        return "eta1"
    if not (p.eta0 + p.eta1 < 2.0 * p.epsilon / L):
        return "eta0+eta1"
    return None


def require_valid_params(p: AlgoParams, L: float) -> None:
    """Raise PreconditionError when validate_params reports a violation."""
    violated = validate_params(p, L)
    if violated is not None:
        raise PreconditionError(violated)


def _as_locked_vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a nonempty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class State:
    """Iterate pair (x, s) with s componentwise nonnegative.

    The constructor copies its inputs, checks finiteness and equal length,
    clamps s entries in [-1e-15, 0) to exactly 0 (the s-update preserves
    nonnegativity only up to rounding) and rejects anything more negative.
    """

    x: np.ndarray
    s: np.ndarray

    def __init__(self, x, s):
        x = _as_locked_vector(x, "x")
        s = np.array(s, dtype=float)
        if s.ndim != 1 or s.size != x.size:
            raise ValueError("x and s must have the same length")
        if not np.all(np.isfinite(s)):
            raise ValueError("s must be finite")
        if np.any(s < -S_CLAMP):
            raise ValueError("s must be componentwise >= 0")
        s[(s >= -S_CLAMP) & (s < 0.0)] = 0.0
        s.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "s", s)

    @property
    def d(self) -> int:
        return self.x.size


def as_step_input(u: float) -> float:
    """Validate a step-size input: a finite float >= 0."""
    u = float(u)
    if not np.isfinite(u) or u < 0.0:
        raise ValueError("step input u must be finite and >= 0")
    return u


def inf_norm(v) -> float:
    """Infinity norm max_i |v_i|.  Empty input is an error."""
    arr = np.asarray(v, dtype=float)
    if arr.size == 0:
        raise ValueError("empty")
    return float(np.max(np.abs(arr)))


def joint_inf_norm(a, b) -> float:
    """Infinity norm of the stacked vector (a, b): max of the two inf norms.

    Either argument may be empty, but not both.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 and b.size == 0:
        raise ValueError("empty")
    if a.size == 0:
        return inf_norm(b)
    if b.size == 0:
        return inf_norm(a)
    return max(inf_norm(a), inf_norm(b))
