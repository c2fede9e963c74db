"""The composite energy function certified to decrease along the iteration.

For a gap w = f(x) - f* and second-moment states s_i,

    V(x, s) = gamma(w) + 2 * sum_i h(s_i)
    gamma(w) = gamma0 * w + (2/3) * gamma1 * w^(3/2)
    h(w)     = sqrt(w) + eps*log(eps) - eps*log(sqrt(w) + eps)

with gamma1 = 12 beta^(3/2) sqrt(L) / (eta0 eps) and gamma0 the max of three
explicit candidates (kept individually for audit).  h is evaluated as
sqrt(w) - eps*log1p(sqrt(w)/eps), which is the same function without the
catastrophic cancellation of the textbook form near w = 0; below
sqrt(w)/eps = 1e-4 a short series keeps full relative accuracy.

All evaluators accept scalars or arrays (last axis = coordinates where it
matters).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlgoParams, require_valid_params
from .engine import step_arrays
from .objectives import Objective


@dataclass(frozen=True)
class LyapunovSpec:
    params: AlgoParams
    L: float
    d: int
    gamma0: float
    gamma1: float
    gamma0_candidates: tuple


def make_spec(p: AlgoParams, L: float, d: int) -> LyapunovSpec:
    """Compute gamma1 and the three-way max defining gamma0."""
    require_valid_params(p, L)
    if d < 1:
        raise ValueError("d must be >= 1")
    beta, eps = p.beta, p.epsilon
    gamma1 = 12.0 * beta**1.5 * np.sqrt(L) / (p.eta0 * eps)
    cand = (
        3.0 * beta / p.eta0,
        beta * eps / (p.eta0 * (eps - (p.eta0 + p.eta1) * L / 2.0)),
        gamma1 * p.eta0 * np.sqrt(L * d) / np.sqrt(beta) + 12.0 * beta * L * np.sqrt(d) / eps,
    )
    return LyapunovSpec(params=p, L=float(L), d=int(d),
                        gamma0=float(max(cand)), gamma1=float(gamma1),
                        gamma0_candidates=tuple(float(c) for c in cand))


def _maybe_float(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def _check_nonneg(w):
    w = np.asarray(w, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("argument must be >= 0")
    return w


def h_func(spec: LyapunovSpec, w):
    """h(w); strictly increasing, concave, h(0) = 0."""
    w = _check_nonneg(w)
    eps = spec.params.epsilon
    r = np.sqrt(w)
    x = r / eps
    small = x < 1e-4
    series = eps * x * x * (0.5 - x / 3.0 + x * x / 4.0 - x**3 / 5.0)
    direct = r - eps * np.log1p(x)
    return _maybe_float(np.where(small, series, direct))


def gamma_func(spec: LyapunovSpec, w):
    """gamma(w) = gamma0*w + (2/3)*gamma1*w^(3/2)."""
    w = _check_nonneg(w)
    return _maybe_float(spec.gamma0 * w + (2.0 / 3.0) * spec.gamma1 * w**1.5)


def gamma_prime(spec: LyapunovSpec, w):
    """gamma'(w) = gamma0 + gamma1*sqrt(w) > 0."""
    w = _check_nonneg(w)
    return _maybe_float(spec.gamma0 + spec.gamma1 * np.sqrt(w))


def value(spec: LyapunovSpec, obj: Objective, x, s):
    """V(x, s) = gamma(f(x) - f*) + 2 sum_i h(s_i); zero only at (x*, 0)."""
    x = np.asarray(x, dtype=float)
    s = _check_nonneg(s)
    if x.shape != s.shape:
        raise ValueError("x and s must have the same shape")
    if x.shape[-1] != obj.d:
        raise ValueError("dimension mismatch with objective")
    return _maybe_float(gamma_func(spec, obj.gap(x)) + 2.0 * np.sum(h_func(spec, s), axis=-1))


def delta(spec: LyapunovSpec, obj: Objective, x, s, u):
    """Exact one-step difference V(x+, s+) - V(x, s) under input u.

    Direct evaluation of both V values; no bound is substituted anywhere.
    """
    x_next, s_next = step_arrays(spec.params, obj, x, s, u)
    return value(spec, obj, x_next, s_next) - value(spec, obj, x, s)
