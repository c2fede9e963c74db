"""rmscert: a deterministic RMSProp-style engine with bounded time-varying
step-size inputs, plus numerical verification of an ISS-Lyapunov decrease
certificate along its trajectories."""

from .core import (AlgoParams, DivergenceError, PreconditionError, State,
                   inf_norm, joint_inf_norm, validate_params)
from .engine import Trace, TraceRecord, run, step
from .lyapunov import LyapunovSpec, make_spec
from .objectives import (LogCoshRegularized, Objective, Quadratic,
                         default_catalog, objective_from_descriptor)

__version__ = "0.1.0"

__all__ = [
    "AlgoParams", "State", "validate_params", "inf_norm", "joint_inf_norm",
    "PreconditionError", "DivergenceError",
    "Objective", "Quadratic", "LogCoshRegularized", "default_catalog",
    "objective_from_descriptor",
    "LyapunovSpec", "make_spec",
    "Trace", "TraceRecord", "run", "step",
    "__version__",
]
