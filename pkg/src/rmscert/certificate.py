"""Explicit certificate constants and numerical verification of the decrease
inequalities satisfied by the Lyapunov function along the iteration.

The module materializes every derived constant of the stability argument
(c_gamma, c_L, the a-/l-/p-terms, rho1/rho2, the psi family, the thresholds
v1/v2 and the comparison pair alpha_V / chi_V), and provides margin checks:

* intermediate bound  -- dV <= -sum beta s_i/(eps+sqrt(s_i))
                          + sum g_i^2 kappa_i / ((eps+sqrt(s_i^+))^2 (eps+sqrt(s_i)))
* refined bound       -- dV <= -beta|s|/(eps+sqrt|s|) + p2 + p3|g|
                          - eta0 rho1 |g|^2 rho2 / (eps+sqrt((1-beta)|s|+beta|g|^2))^2
* region + global ISS -- dV <= -psi_j1(|s|) - psi_j2(|y|) + chi_j(u) on each
                          region, and dV <= -alpha_V(|(y,s)|) + chi_V(u) globally,

(norms are infinity norms, |y| in the region split is Euclidean).  Margins are
always RHS - LHS of the inequality, so nonnegative means "holds".

`verify_suite` aggregates all checks over randomized state sampling and along
actual trajectories into a serializable report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lyapunov as lyap
from .core import AlgoParams, State, require_valid_params
from .engine import run
from .lyapunov import LyapunovSpec
from .objectives import Objective
from .schedules import RandomBounded, Zero

SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertificateConstants:
    """Every derived constant of the decrease argument, in closed form.

    z_star is the unique root of eps = z*sqrt(r_hat4*z^(2q) + r_hat5), found
    by bracketed bisection; everything else is a direct formula in
    (beta, eps, eta0, eta1, L, mu, d, q).
    """

    q: float
    mu: float
    L: float
    d: int
    c_gamma: float
    c_L: float
    eta2: float
    a53: float
    a61: float
    a62: float
    a7: float
    c_m: float
    gamma_hat1: float
    gamma_hat2: float
    r_hat1: float
    r_hat2: float
    r_hat3: float
    r_hat4: float
    r_hat5: float
    eps1: float
    eps2: float
    z_star: float


def make_constants(spec: LyapunovSpec, obj: Objective, q: float = 0.125) -> CertificateConstants:
    """Compute all certificate constants for the given spec/objective pair."""
    if not (0.0 < q < 0.25):
        raise ValueError("q must lie in (0, 1/4)")
    require_valid_params(spec.params, spec.L)
    p = spec.params
    beta, eps = p.beta, p.epsilon
    L, d, mu = spec.L, spec.d, obj.mu
    if obj.d != d:
        raise ValueError("objective dimension does not match spec")

    c_gamma = (8.0 + beta) / (9.0 / math.sqrt(1.0 - beta) + 3.0)
    c_L = L * d / beta
    eta2 = p.eta1 * eps * L / 2.0
    a53 = spec.gamma1 * eps * math.sqrt(c_L) / 6.0
    a61 = math.sqrt(2.0 * (1.0 - beta)) / 2.0
    a62 = math.sqrt(2.0 * beta) / 2.0
    a7 = eps * a62 / 6.0
    c_m = 2.0 * eps * math.sqrt(L * c_L) / (12.0 * beta * math.sqrt(d)
                                            + p.eta0 * spec.gamma1 * eps * math.sqrt(c_L))
    gamma_hat1 = spec.gamma1 * math.sqrt(d) / math.sqrt(2.0 * mu)
    gamma_hat2 = spec.gamma1 * math.sqrt(c_L) / SQRT2
    r_hat1 = mu / math.sqrt(d)
    r_hat2 = (L * L * d / (mu * mu)) ** (1.0 + q)
    r_hat3 = (1.0 - beta) * r_hat2
    r_hat4 = r_hat3 * (L * L * d) ** (1.0 + q)
    r_hat5 = beta * L * L * d

    eps1 = beta
    eps2 = math.sqrt(q * beta * (1.0 + q) ** (-(q + 1.0) / q))

    # z* : eps = z*sqrt(r_hat4*z^(2q) + r_hat5); strictly increasing in z
    phi = lambda z: z * math.sqrt(r_hat4 * z ** (2.0 * q) + r_hat5) - eps
    hi = 1.0
    while phi(hi) < 0.0:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    z_star = 0.5 * (lo + hi)

    return CertificateConstants(
        q=q, mu=mu, L=L, d=d, c_gamma=c_gamma, c_L=c_L, eta2=eta2, a53=a53,
        a61=a61, a62=a62, a7=a7, c_m=c_m, gamma_hat1=gamma_hat1,
        gamma_hat2=gamma_hat2, r_hat1=r_hat1, r_hat2=r_hat2, r_hat3=r_hat3,
        r_hat4=r_hat4, r_hat5=r_hat5, eps1=eps1, eps2=eps2, z_star=z_star)


# ---------------------------------------------------------------------------
# u-dependent scalar families (all array-friendly in u)
# ---------------------------------------------------------------------------

def l_terms(consts: CertificateConstants, spec: LyapunovSpec, u):
    """(l1, l2, l3, l4, l5); l4(0) < 0 under the step-size hypothesis."""
    p = spec.params
    u = np.asarray(u, dtype=float)
    eta = p.eta0 + u
    l1 = eta * 2.0 * np.sqrt(consts.L * consts.c_L) / spec.gamma0
    l2 = 2.0 * np.sqrt(consts.L) / spec.gamma1 + eta * consts.c_m
    l3 = l1 + l2
    l4 = (p.eta0 * consts.L / 2.0 - p.epsilon - p.epsilon / 6.0 * consts.a61
          + u * consts.L / 2.0 + u * consts.a53 * np.sqrt(1.0 - p.beta) / spec.gamma0)
    l5 = p.epsilon * consts.L / 2.0 + consts.a53 * np.sqrt(p.beta) * l3
    return l1, l2, l3, l4, l5


def p_terms(consts: CertificateConstants, spec: LyapunovSpec, u):
    """(p1, p2, p3); all vanish exactly at u = 0 and are nondecreasing."""
    p = spec.params
    u = np.asarray(u, dtype=float)
    eta = p.eta0 + u
    _, _, _, l4, l5 = l_terms(consts, spec, u)
    gamma_hat_1 = np.where(l4 > 0.0, l4 * l4, 0.0) / (4.0 * consts.c_gamma) + u * l5
    big_gamma = (consts.d - 1) * gamma_hat_1 / (p.epsilon * p.beta)
    p1 = (eta * big_gamma + eta * np.maximum(0.0, l4) / p.beta
          + u * eta * l5 / (p.epsilon * p.beta))
    p2 = p1 * (spec.gamma0 + eta * consts.gamma_hat2)
    p3 = p1 * consts.gamma_hat1
    return p1, p2, p3


def rho1(consts: CertificateConstants, spec: LyapunovSpec, g_inf, u):
    """gamma' lower bound gamma0 + gamma1*sqrt(max{0, g^2/(4L) - eta^2 c_L})."""
    p = spec.params
    g_inf = np.asarray(g_inf, dtype=float)
    eta = p.eta0 + np.asarray(u, dtype=float)
    inner = np.maximum(0.0, g_inf * g_inf / (4.0 * consts.L) - eta * eta * consts.c_L)
    return spec.gamma0 + spec.gamma1 * np.sqrt(inner)


def rho2(consts: CertificateConstants, spec: LyapunovSpec, g_inf):
    """2*c_gamma*(sqrt(eps^2 + (a7*g + eta2)/c_gamma) - eps).

    Evaluated in conjugate form 2*(a7*g + eta2)/(sqrt(eps^2 + .) + eps) to
    avoid cancellation for small arguments.
    """
    eps = spec.params.epsilon
    A = consts.a7 * np.asarray(g_inf, dtype=float) + consts.eta2
    return 2.0 * A / (np.sqrt(eps * eps + A / consts.c_gamma) + eps)


def v2_candidates(consts: CertificateConstants, spec: LyapunovSpec, u):
    """The four candidates whose max is v2(u), kept individually for audit."""
    p = spec.params
    u = np.asarray(u, dtype=float)
    eta = p.eta0 + u
    eps = p.epsilon
    q = consts.q
    _, _, p3 = p_terms(consts, spec, u)
    c1 = eta * 2.0 * np.sqrt(2.0 * consts.L * consts.c_L)
    c2 = (eps * eps * consts.c_gamma / consts.a7) + 0.0 * u
    c3 = (((eps + consts.eps2) / np.sqrt(consts.r_hat3 + consts.eps1)) ** (1.0 / (1.0 + q))) + 0.0 * u
    c4 = (p3 * 8.0 * (SQRT2 + 1.0) * np.sqrt(2.0 * consts.L)
          * (consts.r_hat3 + consts.eps1)
          / (p.eta0 * spec.gamma1 * np.sqrt(consts.a7 * consts.c_gamma))) ** (2.0 / (1.0 - 4.0 * q))
    return c1, c2, c3, c4


def v_thresholds(consts: CertificateConstants, spec: LyapunovSpec, u):
    """(v1, v2): gradient-norm thresholds above which the u-terms are absorbed."""
    p = spec.params
    u = np.asarray(u, dtype=float)
    q = consts.q
    _, _, p3 = p_terms(consts, spec, u)
    v1 = np.maximum(p.epsilon ** (1.0 / (1.0 + q)), (6.0 * p3 / p.beta) ** (1.0 / q))
    c1, c2, c3, c4 = v2_candidates(consts, spec, u)
    v2 = np.maximum(np.maximum(c1, c2), np.maximum(c3, c4))
    return v1, v2


# ---------------------------------------------------------------------------
# psi family and the comparison pair
# ---------------------------------------------------------------------------

def _psi11(consts, spec, z):
    eps = spec.params.epsilon
    return spec.params.beta / 3.0 * z / (eps + np.sqrt(z))


def _psi12(consts, spec, z):
    # (beta/3) r1^(2+2q) z^(2+2q) / (eps + r1^(1+q) z^(1+q)); for z > 1 the
    # fraction is rescaled by z^-(1+q) so z^(2+2q) never overflows first.
    beta = spec.params.beta
    eps = spec.params.epsilon
    q = consts.q
    r1p = consts.r_hat1 ** (1.0 + q)
    out = np.empty_like(z)
    small = z <= 1.0
    zs = z[small]
    out[small] = beta / 3.0 * consts.r_hat1 ** (2.0 + 2.0 * q) * zs ** (2.0 + 2.0 * q) \
        / (eps + r1p * zs ** (1.0 + q))
    zl = z[~small]
    out[~small] = beta / 3.0 * consts.r_hat1 ** (2.0 + 2.0 * q) * zl ** (1.0 + q) \
        / (eps * zl ** (-(1.0 + q)) + r1p)
    return out


def _psi21(consts, spec, z):
    eps = spec.params.epsilon
    return spec.params.beta * z / (eps + np.sqrt(z))


def _psi22(consts, spec, z):
    # (eta0 gamma0 r1^2 / 2) z^2 rho2(r1 z) / (eps + sqrt(r4 z^(2+2q) + r5 z^2))^2
    # with sqrt(r4 z^(2+2q)+r5 z^2) = z sqrt(r4 z^(2q)+r5); for z > 1 divide
    # through by z^2 so nothing overflows before the value itself would.
    p = spec.params
    eps = p.epsilon
    q = consts.q
    coeff = p.eta0 * spec.gamma0 * consts.r_hat1 ** 2 / 2.0
    root = np.sqrt(consts.r_hat4 * z ** (2.0 * q) + consts.r_hat5)
    out = np.empty_like(z)
    small = z <= 1.0
    zs = z[small]
    out[small] = coeff * zs * zs * rho2(consts, spec, consts.r_hat1 * zs) \
        / (eps + zs * root[small]) ** 2
    zl = z[~small]
    out[~small] = coeff * rho2(consts, spec, consts.r_hat1 * zl) \
        / (eps / zl + root[~small]) ** 2
    return out


def _psi23(consts, spec, z):
    # piecewise minorant of psi22 obtained by bounding its denominator by
    # 4 eps^2 for z <= z* and by 4 z^2 (r4 z^(2q) + r5) for z > z*;
    # sqrt(eps^2 + A) - eps is evaluated in conjugate form.
    p = spec.params
    eps = p.epsilon
    q = consts.q
    coeff = p.eta0 * spec.gamma0 * consts.r_hat1 ** 2 * consts.c_gamma
    A = (consts.a7 / consts.c_gamma) * consts.r_hat1 * z
    rt = A / (np.sqrt(eps * eps + A) + eps)
    out = np.empty_like(z)
    low = z <= consts.z_star
    out[low] = coeff / (4.0 * eps * eps) * z[low] ** 2 * rt[low]
    zl = z[~low]
    out[~low] = coeff / 4.0 * rt[~low] / (consts.r_hat4 * zl ** (2.0 * q) + consts.r_hat5)
    return out


def psi_family(consts: CertificateConstants, spec: LyapunovSpec, z):
    """(psi11, psi12, psi21, psi22, psi23) at z >= 0 (scalar or array).

    psi21 = 3*psi11 identically, and psi23 <= psi22 pointwise.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0.0):
        raise ValueError("z must be >= 0")
    vals = (_psi11(consts, spec, z), _psi12(consts, spec, z),
            _psi21(consts, spec, z), _psi22(consts, spec, z),
            _psi23(consts, spec, z))
    if scalar:
        return tuple(float(v[0]) for v in vals)
    return vals


def alpha_V(consts: CertificateConstants, spec: LyapunovSpec, z):
    """Decrease-rate comparison function: min of the psi family at z."""
    scalar = np.ndim(z) == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(za < 0.0):
        raise ValueError("z must be >= 0")
    out = np.minimum(np.minimum(_psi11(consts, spec, za), _psi12(consts, spec, za)),
                     np.minimum(_psi21(consts, spec, za), _psi23(consts, spec, za)))
    return float(out[0]) if scalar else out


def chi_V(consts: CertificateConstants, spec: LyapunovSpec, u):
    """Input-gain comparison function p2(u) + p3(u)*max(v1(u), v2(u))."""
    u = np.asarray(u, dtype=float)
    _, p2, p3 = p_terms(consts, spec, u)
    v1, v2 = v_thresholds(consts, spec, u)
    out = p2 + p3 * np.maximum(v1, v2)
    return float(out) if out.ndim == 0 else out


def alpha_chi(consts: CertificateConstants, spec: LyapunovSpec, z, u):
    """(alpha_V(z), chi_V(u))."""
    return alpha_V(consts, spec, z), chi_V(consts, spec, u)


def alpha_V_inverse(consts: CertificateConstants, spec: LyapunovSpec,
                    target: float, z_cap: float = 1e250) -> float:
    """Monotone-bisection inverse of alpha_V; returns inf past the cap.

    alpha_V is strictly increasing with no closed-form inverse.  The bracket
    is grown by doubling; for loose certificates the inverse can exceed the
    float range, in which case inf is returned (the boundedness claim is then
    vacuous but still valid).
    """
    if not np.isfinite(target):
        return math.inf
    if target <= 0.0:
        return 0.0
    hi = 1.0
    while alpha_V(consts, spec, hi) < target:
        hi *= 2.0
        if hi > z_cap:
            return math.inf
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if alpha_V(consts, spec, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# mean-value point xi
# ---------------------------------------------------------------------------

# f-gaps closer than this (relatively) are treated as equal in solve_xi
XI_EQUAL_RTOL = 1e-14


def _divided_difference_slope(spec: LyapunovSpec, a, b):
    """(gamma(b)-gamma(a))/(b-a) in cancellation-free product form.

    Uses (b^{3/2}-a^{3/2})/(b-a) = (a + sqrt(ab) + b)/(sqrt(a)+sqrt(b)); at
    a = b = 0 the slope is gamma'(0) = gamma0.
    """
    sa, sb = np.sqrt(a), np.sqrt(b)
    den = sa + sb
    safe = np.where(den > 0.0, den, 1.0)
    frac = (a + sa * sb + b) / safe
    return np.where(den > 0.0, spec.gamma0 + (2.0 / 3.0) * spec.gamma1 * frac,
                    spec.gamma0)


def _solve_xi_arrays(spec: LyapunovSpec, a, b, iters: int = 200):
    """Vectorized bisection for gamma'(xi) = divided difference of gamma.

    Returns (xi, slope).  Near-equal gaps short-circuit to xi = a; otherwise
    xi is bracketed in [min(a,b), max(a,b)] by the mean value theorem.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    slope = _divided_difference_slope(spec, a, b)
    same = np.abs(b - a) <= XI_EQUAL_RTOL * np.maximum(np.abs(a), np.abs(b))
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    for _ in range(iters):
        if np.all(hi - lo <= 2.0 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
        mid = 0.5 * (lo + hi)
        go_right = spec.gamma0 + spec.gamma1 * np.sqrt(mid) < slope
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    xi = np.where(same, a, 0.5 * (lo + hi))
    return xi, slope


def solve_xi(spec: LyapunovSpec, obj: Objective, p: AlgoParams, st: State,
             u: float) -> float:
    """The mean-value point xi with gamma'(xi) equal to the gamma divided
    difference between the current and next objective gaps."""
    _check_params_match(spec, p)
    from .engine import step_arrays
    x_next, _ = step_arrays(p, obj, st.x, st.s, u)
    a = np.asarray([float(obj.gap(st.x))])
    b = np.asarray([float(obj.gap(x_next))])
    xi, _ = _solve_xi_arrays(spec, a, b)
    return float(xi[0])


def bound_xi(consts: CertificateConstants, spec: LyapunovSpec, obj: Objective,
             p: AlgoParams, st: State, u: float):
    """Closed-form sandwich (xi_lower, xi_upper) in terms of |g|_inf and u."""
    _check_params_match(spec, p)
    g_inf = float(np.max(np.abs(obj.gradient(st.x))))
    eta = p.eta0 + float(u)
    lower = max(0.0, g_inf * g_inf / (4.0 * consts.L) - eta * eta * consts.c_L)
    upper = consts.d / (2.0 * consts.mu) * g_inf * g_inf + eta * eta * consts.c_L / 2.0
    return lower, upper


# ---------------------------------------------------------------------------
# kappa and the margin checks
# ---------------------------------------------------------------------------

def _check_params_match(spec: LyapunovSpec, p: AlgoParams) -> None:
    if p != spec.params:
        raise ValueError("p must be the same parameter tuple the spec was built from")


def _kappa_terms(spec, eta, gp, s_i, sp_i):
    """Definition form of kappa_i plus the magnitude of its largest addend."""
    p = spec.params
    eps = p.epsilon
    t1 = -eta * gp * (eps + np.sqrt(s_i)) * (eps + np.sqrt(sp_i))
    t2 = (eta * eta * gp * spec.L / 2.0) * (eps + np.sqrt(s_i))
    t3 = p.beta * (eps + np.sqrt(sp_i)) ** 2
    return t1 + t2 + t3, np.maximum(np.abs(t1), np.maximum(np.abs(t2), np.abs(t3)))


def kappa(spec: LyapunovSpec, obj: Objective, st: State, u: float, xi: float,
          i: int) -> float:
    """kappa_i in its definition form (pre-rearrangement display)."""
    if not 0 <= i < obj.d:
        raise ValueError("coordinate out of range")
    if xi < 0.0:
        raise ValueError("xi must be >= 0")
    p = spec.params
    g_i = float(obj.gradient(st.x)[i])
    s_i = float(st.s[i])
    sp_i = (1.0 - p.beta) * s_i + p.beta * g_i * g_i
    eta = p.eta0 + float(u)
    gp = float(lyap.gamma_prime(spec, xi))
    val, _ = _kappa_terms(spec, eta, gp, s_i, sp_i)
    return float(val)


def kappa_rearranged(spec: LyapunovSpec, obj: Objective, st: State, u: float,
                     xi: float, i: int) -> float:
    """kappa_i in the four-term rearranged form (algebraically identical)."""
    if not 0 <= i < obj.d:
        raise ValueError("coordinate out of range")
    p = spec.params
    eps = p.epsilon
    g_i = float(obj.gradient(st.x)[i])
    s_i = float(st.s[i])
    sp_i = (1.0 - p.beta) * s_i + p.beta * g_i * g_i
    eta = p.eta0 + float(u)
    gp = float(lyap.gamma_prime(spec, xi))
    rs, rsp = math.sqrt(s_i), math.sqrt(sp_i)
    return float(
        -rsp * (eta * gp * rs - p.beta * rsp)
        - eta * gp * rs * (eps - eta * spec.L / 2.0)
        - 2.0 * (eps / 2.0) * rsp * eta * gp * (1.0 - 2.0 * p.beta / (eta * gp))
        - eps * (eta * gp * (eps - eta * spec.L / 2.0) - p.beta * eps))


def _batch(spec, obj, X, S, U):
    """Shared per-state quantities for the margin checks (batched)."""
    p = spec.params
    X = np.atleast_2d(np.asarray(X, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    U = np.atleast_1d(np.asarray(U, dtype=float))
    G = obj.gradient(X)
    Sp = (1.0 - p.beta) * S + p.beta * G * G
    eta = p.eta0 + U
    Xp = X - eta[:, None] * G / (p.epsilon + np.sqrt(Sp))
    a = np.atleast_1d(obj.gap(X))
    b = np.atleast_1d(obj.gap(Xp))
    dV = (lyap.gamma_func(spec, b) - lyap.gamma_func(spec, a)
          + 2.0 * np.sum(lyap.h_func(spec, Sp) - lyap.h_func(spec, S), axis=-1))
    return dict(X=X, S=S, U=U, G=G, Sp=Sp, Xp=Xp, a=a, b=b, dV=dV, eta=eta)


def _intermediate_rhs(spec, q_):
    """RHS of the intermediate bound, with xi from the mean-value solve."""
    p = spec.params
    eps = p.epsilon
    xi, slope = _solve_xi_arrays(spec, q_["a"], q_["b"])
    gp = spec.gamma0 + spec.gamma1 * np.sqrt(xi)
    kap, _ = _kappa_terms(spec, q_["eta"][:, None], gp[:, None], q_["S"], q_["Sp"])
    S, Sp, G = q_["S"], q_["Sp"], q_["G"]
    rhs = (-np.sum(p.beta * S / (eps + np.sqrt(S)), axis=-1)
           + np.sum(G * G * kap / ((eps + np.sqrt(Sp)) ** 2 * (eps + np.sqrt(S))), axis=-1))
    return rhs, xi, slope, gp


def check_intermediate_bound(spec: LyapunovSpec, obj: Objective, p: AlgoParams,
                             st: State, u: float) -> float:
    """Margin (RHS - LHS) of the intermediate decrease bound at one state."""
    _check_params_match(spec, p)
    q_ = _batch(spec, obj, st.x, st.s, u)
    rhs, _, _, _ = _intermediate_rhs(spec, q_)
    return float(rhs[0] - q_["dV"][0])


def _refined_rhs(consts, spec, q_):
    p = spec.params
    eps = p.epsilon
    g_inf = np.max(np.abs(q_["G"]), axis=-1)
    s_inf = np.max(q_["S"], axis=-1)
    _, p2, p3 = p_terms(consts, spec, q_["U"])
    denom = (eps + np.sqrt((1.0 - p.beta) * s_inf + p.beta * g_inf * g_inf)) ** 2
    rhs = (-p.beta * s_inf / (eps + np.sqrt(s_inf)) + p2 + p3 * g_inf
           - p.eta0 * rho1(consts, spec, g_inf, q_["U"]) * g_inf * g_inf
           * rho2(consts, spec, g_inf) / denom)
    return rhs


def check_refined_bound(spec: LyapunovSpec, obj: Objective, p: AlgoParams,
                        st: State, u: float, q: float = 0.125,
                        consts: CertificateConstants | None = None) -> float:
    """Margin (RHS - LHS) of the refined decrease bound at one state."""
    _check_params_match(spec, p)
    if consts is None:
        consts = make_constants(spec, obj, q)
    q_ = _batch(spec, obj, st.x, st.s, u)
    rhs = _refined_rhs(consts, spec, q_)
    return float(rhs[0] - q_["dV"][0])


def _iss_quantities(consts, spec, obj, q_):
    """Region membership, region-bound RHS and global-bound RHS (batched)."""
    q = consts.q
    Y = q_["X"] - obj.x_star
    y_norm = np.sqrt(np.sum(Y * Y, axis=-1))
    y_inf = np.max(np.abs(Y), axis=-1)
    s_inf = np.max(q_["S"], axis=-1)
    in_s1 = s_inf >= (consts.L * y_norm) ** (2.0 + 2.0 * q)
    _, p2, p3 = p_terms(consts, spec, q_["U"])
    v1, v2 = v_thresholds(consts, spec, q_["U"])
    chi1 = p2 + p3 * v1
    chi2 = p2 + p3 * v2
    # psi_j1 acts on |s|_inf, psi_j2 on |y|_inf
    p11_s = _psi11(consts, spec, s_inf)
    p21_s = _psi21(consts, spec, s_inf)
    p12_y = _psi12(consts, spec, y_inf)
    p22_y = _psi22(consts, spec, y_inf)
    region_rhs = np.where(in_s1, -p11_s - p12_y + chi1, -p21_s - p22_y + chi2)
    z = np.maximum(y_inf, s_inf)
    glob_rhs = -alpha_V(consts, spec, z) + chi_V(consts, spec, q_["U"])
    return in_s1, region_rhs, np.atleast_1d(glob_rhs)


def iss_decrease_detail(spec: LyapunovSpec, obj: Objective, p: AlgoParams,
                        st: State, u: float, q: float = 0.125,
                        consts: CertificateConstants | None = None):
    """(region, region_margin, global_margin) for the final decrease bound."""
    _check_params_match(spec, p)
    if consts is None:
        consts = make_constants(spec, obj, q)
    q_ = _batch(spec, obj, st.x, st.s, u)
    in_s1, region_rhs, glob_rhs = _iss_quantities(consts, spec, obj, q_)
    dv = q_["dV"][0]
    return (("S1" if in_s1[0] else "S2"), float(region_rhs[0] - dv),
            float(glob_rhs[0] - dv))


def check_iss_decrease(spec: LyapunovSpec, obj: Objective, p: AlgoParams,
                       st: State, u: float, q: float = 0.125,
                       consts: CertificateConstants | None = None) -> float:
    """Global decrease-bound margin RHS - LHS (region bound checked too)."""
    return iss_decrease_detail(spec, obj, p, st, u, q, consts)[2]


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------

@dataclass
class SamplerConfig:
    """Sampling plan for verify_suite; all randomness is seeded."""

    n: int = 10_000
    x_range: float = 10.0
    s_range: float = 10.0
    u_max: float = 10.0
    seed: int = 0
    traj_steps: int = 200
    tol: float = 1e-9
    identity_tol: float = 1e-10


@dataclass
class InequalityRecord:
    """Aggregate of one named check over all sampled states.

    kind "inequality": values are margins normalized by max(1, |LHS|); pass
    means >= -tol; worst is the minimum.  kind "identity": values are
    relative residuals; pass means <= tol; worst is the maximum.
    """

    name: str
    kind: str
    checked: int = 0
    failures: int = 0
    worst: float = math.inf
    tol: float = 1e-9
    worst_state: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "checked": self.checked,
                "failures": self.failures, "worst": self.worst, "tol": self.tol,
                "passed": self.passed, "worst_state": self.worst_state}


class _Agg:
    def __init__(self, name, kind, tol, strict=False):
        self.rec = InequalityRecord(name=name, kind=kind, tol=tol)
        self.rec.worst = math.inf if kind == "inequality" else -math.inf
        self.strict = strict  # inequality must hold strictly (> 0), no slack

    def add(self, values, digests=None):
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if values.size == 0:
            return
        r = self.rec
        r.checked += values.size
        if r.kind == "inequality":
            bad = values <= 0.0 if self.strict else values < -r.tol
            r.failures += int(np.sum(bad))
            i = int(np.argmin(values))
            if values[i] < r.worst:
                r.worst = float(values[i])
                r.worst_state = digests[i] if digests is not None else None
        else:
            r.failures += int(np.sum(values > r.tol))
            i = int(np.argmax(values))
            if values[i] > r.worst:
                r.worst = float(values[i])
                r.worst_state = digests[i] if digests is not None else None


@dataclass
class VerificationReport:
    objective: dict
    params: dict
    q: float
    tol: float
    identity_tol: float
    seed: int
    samples: int
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_dict(self) -> dict:
        return {"objective": self.objective, "params": self.params, "q": self.q,
                "tolerance": self.tol, "identity_tolerance": self.identity_tol,
                "seed": self.seed, "samples": self.samples,
                "passed": self.passed,
                "inequalities": [r.to_dict() for r in self.records]}

    def table(self) -> str:
        lines = [f"{'check':34s} {'kind':10s} {'checked':>8s} {'fail':>5s} "
                 f"{'worst':>13s}  verdict"]
        for r in self.records:
            lines.append(f"{r.name:34s} {r.kind:10s} {r.checked:8d} "
                         f"{r.failures:5d} {r.worst:13.4e}  "
                         f"{'PASS' if r.passed else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def evaluate_margins(spec: LyapunovSpec, obj: Objective, X, S, U,
                     consts: CertificateConstants | None = None,
                     q: float = 0.125) -> dict:
    """Batched evaluation of every per-state check.

    X, S have shape (N, d) and U shape (N,).  Returns a dict of arrays:

    dV                   exact Lyapunov difference (the LHS of every bound)
    scale                max(1, |dV|), the normalization for margins
    intermediate, refined, region, iss_global
                         raw margins RHS - LHS of the four decrease bounds
    in_s1                region membership mask
    xi, xi_lower, xi_upper, xi_margin
                         mean-value point, its closed-form sandwich, and
                         min(xi - lower, upper - xi) / max(1, upper)
    mean_value_residual  |gamma'(xi) - divided difference| / divided difference
    kappa_residual       worst relative gap between the two kappa forms
    lemma2_lower, lemma2_upper
                         margins of h(|s|_inf) <= 2 sum h(s_i) <= 2 d h(|s|_inf)
    resid_inf            max(|x - x*|_inf, |s|_inf) per state
    """
    if consts is None:
        consts = make_constants(spec, obj, q)
    q_ = _batch(spec, obj, X, S, U)
    dV = q_["dV"]
    scale = np.maximum(1.0, np.abs(dV))

    rhs_i, xi, slope, gp = _intermediate_rhs(spec, q_)
    rhs_r = _refined_rhs(consts, spec, q_)
    in_s1, region_rhs, glob_rhs = _iss_quantities(consts, spec, obj, q_)

    g_inf = np.max(np.abs(q_["G"]), axis=-1)
    eta = q_["eta"]
    xi_lo = np.maximum(0.0, g_inf * g_inf / (4.0 * consts.L) - eta * eta * consts.c_L)
    xi_hi = consts.d / (2.0 * consts.mu) * g_inf * g_inf + eta * eta * consts.c_L / 2.0

    kd, kmag = _kappa_terms(spec, eta[:, None], gp[:, None], q_["S"], q_["Sp"])
    kr = _kappa_rearranged_batch(spec, eta[:, None], gp[:, None], q_["S"], q_["Sp"])
    kscale = np.maximum(np.abs(kd), np.maximum(kmag, 1.0))

    hsum = 2.0 * np.sum(lyap.h_func(spec, q_["S"]), axis=-1)
    hmax = lyap.h_func(spec, np.max(q_["S"], axis=-1))
    hscale = np.maximum(1.0, hsum)

    resid = np.maximum(np.max(np.abs(q_["X"] - obj.x_star), axis=-1),
                       np.max(q_["S"], axis=-1))
    return {
        "dV": dV, "scale": scale,
        "intermediate": rhs_i - dV, "refined": rhs_r - dV,
        "region": region_rhs - dV, "iss_global": glob_rhs - dV,
        "in_s1": in_s1,
        "xi": xi, "xi_lower": xi_lo, "xi_upper": xi_hi,
        "xi_margin": np.minimum(xi - xi_lo, xi_hi - xi) / np.maximum(1.0, xi_hi),
        "mean_value_residual": np.abs(gp - slope) / np.maximum(slope, 1e-300),
        "kappa_residual": np.max(np.abs(kd - kr) / kscale, axis=-1),
        "lemma2_lower": (hsum - hmax) / hscale,
        "lemma2_upper": (2.0 * consts.d * hmax - hsum) / hscale,
        "resid_inf": resid,
    }


def sample_states(obj: Objective, cfg: SamplerConfig, q: float = 0.125):
    """Randomized state/input sample mixing scales and boundary cases.

    Mixes uniform and log-uniform magnitudes for x - x* and s, zeroes a
    fraction of s entries, pins a block of states onto the region boundary
    |s|_inf = (L |y|_2)^(2+2q), and includes the equilibrium corner cases.
    Half of the inputs u are exactly zero, the rest uniform in (0, u_max].
    """
    if cfg.n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.n, obj.d
    half = n // 2
    X = np.empty((n, d))
    X[:half] = rng.uniform(-cfg.x_range, cfg.x_range, (half, d))
    mags = 10.0 ** rng.uniform(np.log10(cfg.x_range) - 8.0, np.log10(cfg.x_range),
                               (n - half, d))
    X[half:] = rng.choice([-1.0, 1.0], (n - half, d)) * mags
    X += obj.x_star
    S = np.empty((n, d))
    S[:half] = rng.uniform(0.0, cfg.s_range, (half, d))
    S[half:] = 10.0 ** rng.uniform(np.log10(cfg.s_range) - 10.0,
                                   np.log10(cfg.s_range), (n - half, d))
    S[rng.random((n, d)) < 0.1] = 0.0
    U = np.where(rng.random(n) < 0.5, 0.0, rng.uniform(0.0, cfg.u_max, n))

    # corner cases and region-boundary states in the leading rows
    if n >= 4:
        X[0], S[0], U[0] = obj.x_star, 0.0, 0.0
        X[1], S[1], U[1] = obj.x_star, 0.0, cfg.u_max
        X[2], U[2] = obj.x_star, 0.0
        S[3], U[3] = 0.0, 0.0
    lo, hi = 4, min(n, 40)
    if hi > lo:
        Y = X[lo:hi] - obj.x_star
        norms = np.linalg.norm(Y, axis=1)
        S[lo:hi, 0] = (obj.L * norms) ** (2.0 + 2.0 * q)
    return X, S, U


def _digests(X, S, U, obj, source):
    out = []
    for i in range(X.shape[0]):
        out.append({"source": source, "index": i,
                    "x_head": [round(float(v), 6) for v in X[i, :4]],
                    "s_head": [round(float(v), 6) for v in S[i, :4]],
                    "u": float(U[i]),
                    "resid_inf": float(max(np.max(np.abs(X[i] - obj.x_star)),
                                           np.max(S[i])))})
    return out


def verify_suite(spec: LyapunovSpec, obj: Objective, p: AlgoParams,
                 cfg: SamplerConfig | None = None,
                 q: float = 0.125) -> VerificationReport:
    """Run every certificate check over random states and real trajectories.

    Refuses to run (PreconditionError) when the parameter tuple violates the
    admissibility conditions for obj.L.  The report aggregates, for each
    named inequality/identity, the number of checks, failures at the
    configured tolerance, and the worst case with a state digest.
    """
    _check_params_match(spec, p)
    require_valid_params(p, obj.L)
    cfg = cfg or SamplerConfig()
    if cfg.n < 1:
        raise ValueError("need at least one sample")
    consts = make_constants(spec, obj, q)
    tol, itol = cfg.tol, cfg.identity_tol

    aggs = {
        "intermediate_bound": _Agg("intermediate_bound", "inequality", tol),
        "refined_bound": _Agg("refined_bound", "inequality", tol),
        "region_bound": _Agg("region_bound", "inequality", tol),
        "iss_global_bound": _Agg("iss_global_bound", "inequality", tol),
        "xi_sandwich": _Agg("xi_sandwich", "inequality", tol),
        "zero_input_decrease": _Agg("zero_input_decrease", "inequality", tol,
                                    strict=True),
        "lemma2_lower": _Agg("lemma2_lower", "inequality", tol),
        "lemma2_upper": _Agg("lemma2_upper", "inequality", tol),
        "mean_value_identity": _Agg("mean_value_identity", "identity", itol),
        "kappa_rearrangement": _Agg("kappa_rearrangement", "identity", itol),
    }

    total = 0

    def process(X, S, U, source):
        nonlocal total
        X = np.atleast_2d(np.asarray(X, dtype=float))
        S = np.atleast_2d(np.asarray(S, dtype=float))
        U = np.atleast_1d(np.asarray(U, dtype=float))
        digests = _digests(X, S, U, obj, source)
        total += X.shape[0]
        m_ = evaluate_margins(spec, obj, X, S, U, consts=consts, q=q)
        scale = m_["scale"]
        aggs["intermediate_bound"].add(m_["intermediate"] / scale, digests)
        aggs["refined_bound"].add(m_["refined"] / scale, digests)
        aggs["region_bound"].add(m_["region"] / scale, digests)
        aggs["iss_global_bound"].add(m_["iss_global"] / scale, digests)
        aggs["xi_sandwich"].add(m_["xi_margin"], digests)
        aggs["mean_value_identity"].add(m_["mean_value_residual"], digests)
        aggs["kappa_rearrangement"].add(m_["kappa_residual"], digests)
        aggs["lemma2_lower"].add(m_["lemma2_lower"], digests)
        aggs["lemma2_upper"].add(m_["lemma2_upper"], digests)

        # strict decrease with zero input away from the equilibrium
        sel = (U == 0.0) & (m_["resid_inf"] > 0.0)
        if np.any(sel):
            sub = [digests[i] for i in np.flatnonzero(sel)]
            aggs["zero_input_decrease"].add((-m_["dV"][sel]) / scale[sel], sub)

    X, S, U = sample_states(obj, cfg, q)
    process(X, S, U, "sample")

    rng = np.random.default_rng(cfg.seed + 1)
    x0 = obj.x_star + rng.uniform(-cfg.x_range, cfg.x_range, obj.d)
    s0 = rng.uniform(0.0, cfg.s_range, obj.d)
    init = State(x0, s0)
    for tag, sched in (("traj_zero", Zero()),
                       ("traj_random", RandomBounded(cfg.u_max, cfg.seed + 2))):
        tr = run(p, obj, init, sched, cfg.traj_steps)
        process(tr.x[:-1], tr.s[:-1], tr.u[:-1], tag)

    # grid-based checks ----------------------------------------------------
    zg = np.logspace(-8.0, 8.0, 400)
    _, _, _, p22, p23 = psi_family(consts, spec, zg)
    g_dom = _Agg("psi23_le_psi22", "inequality", tol)
    g_dom.add((p22 - p23) / np.maximum(1.0, np.abs(p22)))
    aggs["psi23_le_psi22"] = g_dom

    gg = np.logspace(-8.0, 8.0, 400)
    g_eps = _Agg("eps1_eps2_bound", "inequality", tol)
    lhs = p.beta * gg * gg
    rhs = consts.eps1 * gg ** (2.0 + 2.0 * consts.q) + consts.eps2 ** 2
    g_eps.add((rhs - lhs) / np.maximum(1.0, np.abs(lhs)))
    aggs["eps1_eps2_bound"] = g_eps

    rng2 = np.random.default_rng(cfg.seed + 3)
    sm = 10.0 ** rng2.uniform(-8.0, 8.0, 2000)
    gv = 10.0 ** rng2.uniform(-8.0, 4.0, 2000)
    ratio = (consts.c_gamma * sm + consts.a7 * gv + consts.eta2) / (p.epsilon + np.sqrt(sm))
    g_rho = _Agg("rho2_defining_max", "inequality", tol)
    g_rho.add((ratio - rho2(consts, spec, gv)) / np.maximum(1.0, ratio))
    aggs["rho2_defining_max"] = g_rho

    g_chi = _Agg("chi_zero_input", "identity", 0.0)
    g_chi.add([abs(float(chi_V(consts, spec, 0.0)))])
    aggs["chi_zero_input"] = g_chi

    zg2 = np.logspace(-6.0, 6.0, 200)
    av = alpha_V(consts, spec, zg2)
    g_pos = _Agg("alpha_positive", "inequality", tol, strict=True)
    g_pos.add(av)
    aggs["alpha_positive"] = g_pos
    g_mono = _Agg("alpha_nondecreasing", "inequality", 0.0)
    g_mono.add(np.diff(av))
    aggs["alpha_nondecreasing"] = g_mono

    report = VerificationReport(
        objective=obj.descriptor(),
        params={"beta": p.beta, "epsilon": p.epsilon, "eta0": p.eta0, "eta1": p.eta1},
        q=q, tol=tol, identity_tol=itol, seed=cfg.seed, samples=total,
        records=[a.rec for a in aggs.values()])
    return report


def _kappa_rearranged_batch(spec, eta, gp, S, Sp):
    p = spec.params
    eps = p.epsilon
    rs, rsp = np.sqrt(S), np.sqrt(Sp)
    return (-rsp * (eta * gp * rs - p.beta * rsp)
            - eta * gp * rs * (eps - eta * spec.L / 2.0)
            - 2.0 * (eps / 2.0) * rsp * eta * gp * (1.0 - 2.0 * p.beta / (eta * gp))
            - eps * (eta * gp * (eps - eta * spec.L / 2.0) - p.beta * eps))
