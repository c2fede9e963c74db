"""The adaptive-step iteration and trajectory driver.

The update, per coordinate, with g = gradient at the current x:

    s+ = (1 - beta) * s + beta * g^2
    x+ = x - (eta0 + u) * g / (epsilon + sqrt(s+))

`step` advances a single validated State; `run` drives a full trajectory with
a schedule for u and records a columnar Trace.  Both are deterministic
functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (AlgoParams, DivergenceError, State, as_step_input,
                   require_valid_params)
from .objectives import Objective

# Abort threshold for max(|x - x*|_inf, |s|_inf); also catches NaN/inf.
DIVERGENCE_GUARD = 1e12


def step_arrays(p: AlgoParams, obj: Objective, x, s, u):
    """Raw update on arrays; x, s of shape (..., d), u scalar or (...).

    Returns (x_next, s_next).  No validation beyond a finite-gradient check.
    """
    g = obj.gradient(x)
    if not np.all(np.isfinite(g)):
        raise ValueError("non-finite gradient")
    s_next = (1.0 - p.beta) * s + p.beta * g * g
    eta = p.eta0 + np.asarray(u, dtype=float)
    if eta.ndim and np.asarray(x).ndim > 1:
        eta = eta[..., None]
    x_next = x - eta * g / (p.epsilon + np.sqrt(s_next))
    return x_next, s_next


def step(p: AlgoParams, obj: Objective, st: State, u: float) -> State:
    """One validated iteration step; returns the next State."""
    require_valid_params(p, obj.L)
    u = as_step_input(u)
    x_next, s_next = step_arrays(p, obj, st.x, st.s, u)
    return State(x_next, s_next)


@dataclass(frozen=True)
class TraceRecord:
    """One step's audit row.

    u is the input applied at this state (i.e. the one producing record t+1);
    resid_inf is max(|x - x*|_inf, |s|_inf).
    """

    t: int
    x: np.ndarray
    s: np.ndarray
    u: float
    f_gap: float
    grad_inf: float
    resid_inf: float


class Trace:
    """Columnar trajectory history behaving as a sequence of TraceRecord."""

    def __init__(self, x_hist, s_hist, u_hist, obj: Objective):
        self.x = x_hist
        self.s = s_hist
        self.u = u_hist
        self.x_star = obj.x_star
        self.t = np.arange(len(u_hist))
        self.f_gap = np.atleast_1d(obj.gap(x_hist))
        g = obj.gradient(x_hist)
        self.grad_inf = np.max(np.abs(g), axis=-1)
        self.resid_inf = np.maximum(np.max(np.abs(x_hist - obj.x_star), axis=-1),
                                    np.max(s_hist, axis=-1))

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i: int) -> TraceRecord:
        return TraceRecord(int(self.t[i]), self.x[i], self.s[i], float(self.u[i]),
                           float(self.f_gap[i]), float(self.grad_inf[i]),
                           float(self.resid_inf[i]))

    def final(self) -> TraceRecord:
        return self[len(self) - 1]

    def write_csv(self, path, header_comment: str | None = None) -> None:
        """Write the trace as CSV with 17 significant digits per value.

        Full x/s columns are included only for d <= 10.  An optional single
        '#' comment line (e.g. the resolved config) is written first so the
        file is self-describing.
        """
        d = self.x.shape[1]
        cols = ["t", "u", "f_gap", "grad_inf", "resid_inf"]
        with_state = d <= 10
        if with_state:
            cols += [f"x_{i}" for i in range(d)] + [f"s_{i}" for i in range(d)]
        with open(path, "w") as fh:
            if header_comment is not None:
                fh.write(f"# {header_comment}\n")
            fh.write(",".join(cols) + "\n")
            for i in range(len(self)):
                row = [str(int(self.t[i]))]
                row += [f"{v:.17g}" for v in
                        (self.u[i], self.f_gap[i], self.grad_inf[i], self.resid_inf[i])]
                if with_state:
                    row += [f"{v:.17g}" for v in self.x[i]]
                    row += [f"{v:.17g}" for v in self.s[i]]
                fh.write(",".join(row) + "\n")


def run(p: AlgoParams, obj: Objective, init: State, sched, T: int,
        guard: float = DIVERGENCE_GUARD) -> Trace:
    """Run T steps from init under the schedule; returns a (T+1)-row Trace.

    Record t+1 is obtained from record t with u = sched.value(t).  Raises
    DivergenceError (carrying the finite partial trace) as soon as
    max(|x - x*|_inf, |s|_inf) exceeds the guard or turns non-finite.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    require_valid_params(p, obj.L)
    if init.d != obj.d:
        raise ValueError("init dimension does not match objective")

    d = obj.d
    beta, eps_reg, eta0 = p.beta, p.epsilon, p.eta0
    x_star = obj.x_star
    gradient = obj.gradient

    x_hist = np.empty((T + 1, d))
    s_hist = np.empty((T + 1, d))
    u_hist = np.empty(T + 1)
    x = init.x.copy()
    s = init.s.copy()
    x_hist[0] = x
    s_hist[0] = s

    for t in range(T):
        u = sched.value(t)
        u_hist[t] = u
        g = gradient(x)
        s = (1.0 - beta) * s + beta * g * g
        x = x - (eta0 + u) * g / (eps_reg + np.sqrt(s))
        resid = max(np.max(np.abs(x - x_star)), np.max(s))
        if not (resid <= guard):
            u_hist[t + 1] = sched.value(t + 1)
            partial = Trace(x_hist[: t + 1].copy(), s_hist[: t + 1].copy(),
                            u_hist[: t + 1].copy(), obj)
            raise DivergenceError(t + 1, partial)
        x_hist[t + 1] = x
        s_hist[t + 1] = s
    u_hist[T] = sched.value(T)
    return Trace(x_hist, s_hist, u_hist, obj)
