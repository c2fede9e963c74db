"""Catalog of strongly convex, globally smooth test objectives.

Each objective knows its strong-convexity modulus mu, smoothness constant L,
unique minimizer x_star and minimum value f_star analytically, so no constant
has to be estimated.  `value`/`gap`/`gradient` accept a single point of shape
(d,) or a batch of shape (N, d); the gradient is shape-preserving.

Two families are provided:

* Quadratic:  f(x) = 0.5 (x-x*)^T Q (x-x*) + f*, mu = lambda_min(Q),
  L = lambda_max(Q).
* LogCoshRegularized:  f(x) = sum_i [ 0.5 mu_reg z_i^2 + log cosh z_i ],
  z = x - shift.  Non-quadratic, mu = mu_reg, L = mu_reg + 1.
"""

from __future__ import annotations

import numpy as np

from .core import inf_norm

_LOG2 = float(np.log(2.0))


class Objective:
    """Base class; concrete objectives fill d, mu, L, x_star, f_star, name."""

    d: int
    mu: float
    L: float
    x_star: np.ndarray
    f_star: float
    name: str

    def gap(self, x):
        """f(x) - f_star, computed without cancellation."""
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def value(self, x):
        return self.gap(x) + self.f_star

    def descriptor(self) -> dict:
        raise NotImplementedError

    def _check_shape(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1] != self.d:
            raise ValueError(f"expected vectors of length {self.d}, got shape {arr.shape}")
        return arr

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} d={self.d} mu={self.mu:g} L={self.L:g}>"


class Quadratic(Objective):
    def __init__(self, Q, x_star, f_star: float = 0.0, name: str = "", recipe: dict | None = None):
        Q = np.array(Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ValueError("Q must be a square matrix")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ValueError("Q must be symmetric")
        eigs = np.linalg.eigvalsh(Q)
        if eigs[0] <= 0.0:
            raise ValueError("Q must be positive definite")
        self.Q = Q
        self.Q.flags.writeable = False
        self.d = Q.shape[0]
        self.mu = float(eigs[0])
        self.L = float(eigs[-1])
        self.x_star = np.array(x_star, dtype=float)
        if self.x_star.shape != (self.d,):
            raise ValueError("x_star has wrong length")
        self.x_star.flags.writeable = False
        self.f_star = float(f_star)
        self.name = name or f"quadratic_d{self.d}"
        self._recipe = recipe

    def gap(self, x):
        y = self._check_shape(x) - self.x_star
        return 0.5 * np.sum((y @ self.Q) * y, axis=-1)

    def gradient(self, x):
        y = self._check_shape(x) - self.x_star
        return y @ self.Q

    def descriptor(self) -> dict:
        if self._recipe is not None:
            return dict(self._recipe)
        return {
            "kind": "quadratic",
            "d": self.d,
            "Q": self.Q.tolist(),
            "x_star": self.x_star.tolist(),
            "f_star": self.f_star,
        }


class LogCoshRegularized(Objective):
    def __init__(self, mu_reg: float, shift, name: str = "", recipe: dict | None = None):
        if not mu_reg > 0.0:
            raise ValueError("mu_reg must be positive")
        self.mu_reg = float(mu_reg)
        self.x_star = np.array(shift, dtype=float)
        if self.x_star.ndim != 1 or self.x_star.size < 1:
            raise ValueError("shift must be a nonempty vector")
        self.x_star.flags.writeable = False
        self.d = self.x_star.size
        self.mu = self.mu_reg
        # second derivative is mu_reg + sech^2(z) <= mu_reg + 1
        self.L = self.mu_reg + 1.0
        self.f_star = 0.0
        self.name = name or f"log_cosh_d{self.d}"
        self._recipe = recipe

    def gap(self, x):
        z = self._check_shape(x) - self.x_star
        az = np.abs(z)
        # log cosh z = |z| + log1p(exp(-2|z|)) - log 2, stable for large |z|
        log_cosh = az + np.log1p(np.exp(-2.0 * az)) - _LOG2
        return np.sum(0.5 * self.mu_reg * z * z + log_cosh, axis=-1)

    def gradient(self, x):
        z = self._check_shape(x) - self.x_star
        return self.mu_reg * z + np.tanh(z)

    def descriptor(self) -> dict:
        if self._recipe is not None:
            return dict(self._recipe)
        return {
            "kind": "log_cosh",
            "d": self.d,
            "mu_reg": self.mu_reg,
            "shift": self.x_star.tolist(),
        }


def random_quadratic(d: int, cond: float, seed: int) -> Quadratic:
    """Seeded quadratic with lambda_max = 1 and lambda_min = 1/cond exactly.

    A raw Gram matrix R^T R is drawn from the seed and affinely rescaled
    (a*A + b*I) so that its spectrum spans [1/cond, 1]; this pins mu and L
    without estimation while keeping the eigenbasis random.
    """
    if d < 1 or cond < 1.0:
        raise ValueError("need d >= 1 and cond >= 1")
    rng = np.random.default_rng(seed)
    x_star = rng.uniform(-1.0, 1.0, d)
    recipe = {"kind": "quadratic", "d": d, "cond": float(cond), "seed": int(seed)}
    if d == 1 or cond == 1.0:
        Q = np.eye(d)
    else:
        R = rng.standard_normal((d, d))
        A = R.T @ R
        eigs = np.linalg.eigvalsh(A)
        lo, hi = float(eigs[0]), float(eigs[-1])
        if hi - lo < 1e-12 * hi:
            Q = np.eye(d)
        else:
            a = (1.0 - 1.0 / cond) / (hi - lo)
            b = 1.0 - a * hi
            Q = a * A + b * np.eye(d)
            Q = 0.5 * (Q + Q.T)
    name = f"quadratic_d{d}_cond{cond:g}"
    return Quadratic(Q, x_star, 0.0, name=name, recipe=recipe)


def random_log_cosh(d: int, mu_reg: float, seed: int) -> LogCoshRegularized:
    """Seeded log-cosh objective with shift drawn uniformly from [-1, 1]^d."""
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-1.0, 1.0, d)
    recipe = {"kind": "log_cosh", "d": d, "mu_reg": float(mu_reg), "seed": int(seed)}
    return LogCoshRegularized(mu_reg, shift, name=f"log_cosh_d{d}_mu{mu_reg:g}", recipe=recipe)


def objective_from_descriptor(desc: dict) -> Objective:
    """Rebuild an objective from its JSON descriptor."""
    kind = desc.get("kind")
    if kind == "quadratic":
        if "Q" in desc:
            return Quadratic(desc["Q"], desc["x_star"], desc.get("f_star", 0.0))
        return random_quadratic(int(desc["d"]), float(desc.get("cond", 1.0)), int(desc["seed"]))
    if kind == "log_cosh":
        if "shift" in desc:
            return LogCoshRegularized(float(desc["mu_reg"]), desc["shift"])
        return random_log_cosh(int(desc["d"]), float(desc["mu_reg"]), int(desc["seed"]))
    raise ValueError(f"unknown objective kind: {kind!r}")


def default_catalog() -> list[Objective]:
    """The standard objective set used by tests and the verification harness.

    Quadratics at d in {1, 2, 10} with condition numbers {1, 10, 100}
    (d = 1 only admits cond = 1) and log-cosh objectives at the same
    dimensions with mu_reg in {0.1, 1}.  All smoothness constants are <= 2,
    so one admissible parameter tuple works across the whole catalog.
    """
    objs: list[Objective] = [random_quadratic(1, 1.0, seed=11)]
    for d in (2, 10):
        for cond in (1.0, 10.0, 100.0):
            objs.append(random_quadratic(d, cond, seed=100 * d + int(cond)))
    for d in (1, 2, 10):
        for mu_reg in (0.1, 1.0):
            objs.append(random_log_cosh(d, mu_reg, seed=200 * d + int(10 * mu_reg)))
    return objs


def check_gradient_fd(obj: Objective, x, h: float = 1e-6) -> float:
    """Max abs error between the analytic gradient and central differences.

    Central difference per coordinate: (f(x + h e_i) - f(x - h e_i)) / (2h).
    """
    if not (1e-8 <= h <= 1e-4):
        raise ValueError("perturbation h must lie in [1e-8, 1e-4]")
    x = np.asarray(x, dtype=float)
    g = obj.gradient(x)
    worst = 0.0
    for i in range(obj.d):
        e = np.zeros(obj.d)
        e[i] = h
        fd = (obj.value(x + e) - obj.value(x - e)) / (2.0 * h)
        worst = max(worst, abs(fd - g[i]))
    return worst


def check_mu_L_bounds(obj: Objective, x, y, tol: float = 1e-9) -> dict[str, bool]:
    """Verify the three smoothness / strong-convexity inequalities at (x, y).

    Returns a verdict per bound (Euclidean norms):
      lipschitz:  ||grad(y) - grad(x)|| <= L ||y - x|| (1 + tol)
      grad_lower: 2 mu (f(x) - f*) <= ||grad(x)||^2 (1 + tol)
      gap_lower:  f(x) - f* >= ||grad(x)||^2 / (2L) (1 - tol)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    gx = obj.gradient(x)
    gy = obj.gradient(y)
    gap = float(obj.gap(x))
    gx2 = float(np.dot(gx, gx))
    lip = float(np.linalg.norm(gy - gx)) <= obj.L * float(np.linalg.norm(y - x)) * (1.0 + tol)
    grad_lower = 2.0 * obj.mu * gap <= gx2 * (1.0 + tol) + 1e-300
    gap_lower = gap >= gx2 / (2.0 * obj.L) * (1.0 - tol) - 1e-300
    return {"lipschitz": lip, "grad_lower": grad_lower, "gap_lower": gap_lower}


def gradient_at_minimizer_ok(obj: Objective, tol: float = 1e-10) -> bool:
    """True when the analytic gradient vanishes at x_star within tol."""
    return inf_norm(obj.gradient(obj.x_star)) <= tol
