import numpy as np
import pytest

from rmscert.objectives import (LogCoshRegularized, Quadratic,
                                check_gradient_fd, check_mu_L_bounds,
                                default_catalog, gradient_at_minimizer_ok,
                                objective_from_descriptor, random_log_cosh,
                                random_quadratic)

# frozen from 50-digit evaluation: 0.25 + log(cosh(1))
LOGCOSH_F_AT_1 = 0.6837808304830272
# frozen from 50-digit evaluation: 0.5 + tanh(1)
LOGCOSH_G_AT_1 = 1.2615941559557649


class TestQuadratic:
    def test_value_example(self, unit_quad):
        # f(x) = x^2/2: f(2) = 2
        assert unit_quad.value(np.array([2.0])) == pytest.approx(2.0, abs=0.0)

    def test_value_at_minimizer(self, catalog):
        for obj in catalog:
            assert obj.value(obj.x_star) == pytest.approx(obj.f_star, abs=1e-300)

    def test_gradient_linear(self):
        obj = Quadratic([[2.0]], [0.0])
        assert obj.gradient(np.array([3.0]))[0] == pytest.approx(6.0, abs=0.0)

    def test_batched_eval(self, unit_quad):
        X = np.array([[1.0], [2.0], [-3.0]])
        np.testing.assert_allclose(unit_quad.value(X), [0.5, 2.0, 4.5])
        np.testing.assert_allclose(unit_quad.gradient(X), X)

    def test_dimension_mismatch(self, unit_quad):
        with pytest.raises(ValueError):
            unit_quad.value(np.zeros(2))

    def test_rejects_non_spd(self):
        with pytest.raises(ValueError):
            Quadratic([[0.0]], [0.0])
        with pytest.raises(ValueError):
            Quadratic([[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])


class TestLogCosh:
    def test_value_frozen(self):
        obj = LogCoshRegularized(0.5, [0.0])
        assert obj.value(np.array([1.0])) == pytest.approx(LOGCOSH_F_AT_1, rel=1e-14)

    def test_gradient_frozen(self):
        obj = LogCoshRegularized(0.5, [0.0])
        assert obj.gradient(np.array([1.0]))[0] == pytest.approx(LOGCOSH_G_AT_1, rel=1e-14)

    def test_large_argument_stable(self):
        obj = LogCoshRegularized(1.0, [0.0])
        # naive log(cosh(800)) overflows; the stable form must not
        v = obj.value(np.array([800.0]))
        assert np.isfinite(v)
        assert v == pytest.approx(0.5 * 800.0**2 + 800.0 - np.log(2.0), rel=1e-12)

    def test_constants(self):
        obj = LogCoshRegularized(0.1, np.zeros(3))
        assert obj.mu == 0.1
        assert obj.L == 1.1


class TestGradientCheck:
    def test_quadratic_small_error(self):
        obj = random_quadratic(2, 10.0, seed=0)
        rng = np.random.default_rng(1)
        for _ in range(10):
            x = rng.uniform(-5, 5, 2)
            err = check_gradient_fd(obj, x, h=1e-6)
            assert err <= 1e-6 * (1.0 + np.linalg.norm(x))

    def test_at_minimizer(self, catalog):
        for obj in catalog:
            assert check_gradient_fd(obj, obj.x_star, h=1e-6) <= 1e-8

    def test_log_cosh_random(self):
        obj = random_log_cosh(3, 0.5, seed=2)
        rng = np.random.default_rng(3)
        for _ in range(10):
            err = check_gradient_fd(obj, rng.uniform(-5, 5, 3), h=1e-6)
            assert err <= 1e-6

    def test_h_out_of_range(self, unit_quad):
        with pytest.raises(ValueError):
            check_gradient_fd(unit_quad, [1.0], h=1e-3)


class TestMuLBounds:
    def test_scalar_op_on_random_pairs(self, catalog):
        rng = np.random.default_rng(4)
        for obj in catalog:
            for _ in range(50):
                x = obj.x_star + rng.uniform(-10, 10, obj.d)
                y = obj.x_star + rng.uniform(-10, 10, obj.d)
                verdict = check_mu_L_bounds(obj, x, y)
                assert all(verdict.values()), (obj.name, verdict)

    def test_near_degenerate_direction(self, catalog):
        for obj in catalog:
            x = obj.x_star + 0.5
            y = x.copy()
            y[0] += 1e-12
            assert all(check_mu_L_bounds(obj, x, y).values())

    def test_bulk_inequalities_10k(self, catalog):
        # the same three inequalities, vectorized, at the spec'd sample size
        rng = np.random.default_rng(5)
        tol = 1e-9
        for obj in catalog:
            X = obj.x_star + rng.uniform(-10, 10, (10_000, obj.d))
            Y = obj.x_star + rng.uniform(-10, 10, (10_000, obj.d))
            gx = obj.gradient(X)
            gy = obj.gradient(Y)
            gaps = np.atleast_1d(obj.gap(X))
            gx2 = np.sum(gx * gx, axis=-1)
            lip_lhs = np.linalg.norm(gy - gx, axis=-1)
            lip_rhs = obj.L * np.linalg.norm(Y - X, axis=-1)
            assert np.all(lip_lhs <= lip_rhs * (1.0 + tol) + 1e-300), obj.name
            assert np.all(2.0 * obj.mu * gaps <= gx2 * (1.0 + tol) + 1e-300), obj.name
            assert np.all(gaps >= gx2 / (2.0 * obj.L) * (1.0 - tol) - 1e-300), obj.name

    def test_strong_convexity_lower_bound(self, catalog):
        rng = np.random.default_rng(6)
        for obj in catalog:
            X = obj.x_star + rng.uniform(-10, 10, (2000, obj.d))
            gaps = np.atleast_1d(obj.gap(X))
            sq = np.sum((X - obj.x_star) ** 2, axis=-1)
            assert np.all(gaps >= 0.5 * obj.mu * sq * (1.0 - 1e-9)), obj.name


class TestCatalog:
    def test_composition(self, catalog):
        names = [o.name for o in catalog]
        assert len(catalog) == 13
        assert len(set(names)) == 13
        assert {o.d for o in catalog} == {1, 2, 10}

    def test_admits_reference_params(self, catalog):
        # guarantees one parameter tuple works across the entire catalog
        assert all(obj.L <= 2.0 for obj in catalog)

    def test_quadratic_spectrum_pinned(self):
        obj = random_quadratic(10, 100.0, seed=42)
        eigs = np.linalg.eigvalsh(obj.Q)
        assert eigs[-1] == pytest.approx(1.0, rel=1e-12)
        assert eigs[0] == pytest.approx(0.01, rel=1e-9)

    def test_gradient_vanishes_at_minimizer(self, catalog):
        for obj in catalog:
            assert gradient_at_minimizer_ok(obj, tol=1e-10), obj.name


class TestDescriptors:
    def test_seeded_round_trip(self, catalog):
        for obj in catalog:
            clone = objective_from_descriptor(obj.descriptor())
            assert clone.name == obj.name or clone.d == obj.d
            np.testing.assert_array_equal(clone.x_star, obj.x_star)
            if isinstance(obj, Quadratic):
                np.testing.assert_array_equal(clone.Q, obj.Q)
            else:
                assert clone.mu_reg == obj.mu_reg

    def test_explicit_quadratic(self):
        desc = {"kind": "quadratic", "Q": [[2.0]], "x_star": [1.0], "f_star": 3.0}
        obj = objective_from_descriptor(desc)
        assert obj.value(np.array([1.0])) == 3.0
        assert obj.L == 2.0

    def test_explicit_log_cosh(self):
        obj = objective_from_descriptor({"kind": "log_cosh", "d": 2,
                                         "mu_reg": 0.5, "shift": [0.0, 1.0]})
        assert obj.x_star[1] == 1.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            objective_from_descriptor({"kind": "rosenbrock"})
