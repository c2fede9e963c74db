import numpy as np
import pytest

from rmscert.core import AlgoParams, PreconditionError
from rmscert.lyapunov import (delta, gamma_func, gamma_prime, h_func,
                              make_spec, value)
from rmscert.objectives import random_log_cosh

# frozen from 50-digit evaluation
H_1_EPS1 = 0.3068528194400547        # 1 - ln 2
H_4_EPS2 = 0.6137056388801094        # 2 - 2 ln 2
GAMMA1_REF = 42.42640687119285       # 12 * 0.5^1.5 / 0.1
GAMMA_AT_1_REF = 43.2842712474619    # gamma0 + (2/3) gamma1
V_REF_X1_S0 = 17.5                   # gamma(0.5) at the reference constants


class TestMakeSpec:
    def test_reference_constants(self, ref_spec):
        assert ref_spec.gamma1 == pytest.approx(GAMMA1_REF, rel=1e-14)
        assert ref_spec.gamma0 == 15.0
        c1, c2, c3 = ref_spec.gamma0_candidates
        assert c1 == 15.0
        assert c2 == pytest.approx(0.5 / 0.09, rel=1e-12)
        assert c3 == pytest.approx(12.0, rel=1e-12)

    def test_gamma1_inverse_in_eta0(self, unit_quad):
        # doubling eta0 halves gamma1 exactly (power-of-two scaling)
        a = make_spec(AlgoParams(0.5, 1.0, 0.1, 0.1), 1.0, 1)
        b = make_spec(AlgoParams(0.5, 1.0, 0.2, 0.1), 1.0, 1)
        assert b.gamma1 == 0.5 * a.gamma1

    def test_third_candidate_sqrt_d_scaling(self):
        a = make_spec(AlgoParams(0.5, 1.0, 0.1, 0.1), 1.0, 1)
        b = make_spec(AlgoParams(0.5, 1.0, 0.1, 0.1), 1.0, 4)
        assert b.gamma0_candidates[2] == pytest.approx(
            2.0 * a.gamma0_candidates[2], rel=1e-15)

    def test_rejects_inadmissible(self):
        with pytest.raises(PreconditionError):
            make_spec(AlgoParams(0.5, 1.0, 1.5, 0.6), 1.0, 1)
        with pytest.raises(PreconditionError):
            make_spec(AlgoParams(0.5, 1.0, 3.0, 0.1), 1.0, 1)  # eta0 = 3*eps/L


class TestH:
    def test_zero(self, ref_spec):
        assert h_func(ref_spec, 0.0) == 0.0

    def test_frozen_values(self, ref_spec):
        assert h_func(ref_spec, 1.0) == pytest.approx(H_1_EPS1, rel=1e-14)
        spec2 = make_spec(AlgoParams(0.5, 2.0, 0.1, 0.1), 1.0, 1)
        assert h_func(spec2, 4.0) == pytest.approx(H_4_EPS2, rel=1e-14)

    def test_negative_rejected(self, ref_spec):
        with pytest.raises(ValueError):
            h_func(ref_spec, -1e-3)

    def test_tiny_argument_no_cancellation(self, ref_spec):
        # h(w) = w/(2 eps) - w^{3/2}/(3 eps^2) + O(w^2); the naive form
        # returns exactly 0 here
        w = 1e-20
        expect = w / 2.0 - w**1.5 / 3.0
        assert h_func(ref_spec, w) == pytest.approx(expect, rel=1e-9)

    def test_series_matches_direct_at_branch_point(self, ref_spec):
        # the branch switches at sqrt(w)/eps = 1e-4
        for w in (0.9e-8, 1.1e-8):
            r = np.sqrt(w)
            direct = r - 1.0 * np.log1p(r / 1.0)
            assert h_func(ref_spec, w) == pytest.approx(direct, rel=1e-10)

    def test_increasing_and_concave(self, ref_spec):
        rng = np.random.default_rng(11)
        a = 10.0 ** rng.uniform(-12, 6, 500)
        b = a * (1.0 + rng.uniform(0.01, 10.0, 500))
        ha, hb, hm = (h_func(ref_spec, v) for v in (a, b, 0.5 * (a + b)))
        assert np.all(ha < hb)
        assert np.all(hm >= 0.5 * (ha + hb) - 1e-12)

    def test_derivative_identity(self, ref_spec):
        # finite differences reproduce h'(w) = 1/(2 (sqrt(w) + eps))
        for w in (1e-3, 0.1, 1.0, 7.3, 1e3):
            fd = (h_func(ref_spec, w + 1e-6) - h_func(ref_spec, w - 1e-6)) / 2e-6
            closed = 1.0 / (2.0 * (np.sqrt(w) + 1.0))
            assert fd == pytest.approx(closed, rel=1e-6)


class TestGamma:
    def test_zero(self, ref_spec):
        assert gamma_func(ref_spec, 0.0) == 0.0

    def test_frozen_value(self, ref_spec):
        assert gamma_func(ref_spec, 1.0) == pytest.approx(GAMMA_AT_1_REF, rel=1e-14)

    def test_symbolic_scaling_at_4(self, ref_spec):
        # 4^{3/2} = 8
        expect = 4.0 * ref_spec.gamma0 + (16.0 / 3.0) * ref_spec.gamma1
        assert gamma_func(ref_spec, 4.0) == pytest.approx(expect, rel=1e-15)

    def test_prime_values(self, ref_spec):
        assert gamma_prime(ref_spec, 0.0) == ref_spec.gamma0
        assert gamma_prime(ref_spec, 1.0) == ref_spec.gamma0 + ref_spec.gamma1

    def test_prime_matches_finite_difference(self, ref_spec):
        w = 2.5
        fd = (gamma_func(ref_spec, w + 1e-6) - gamma_func(ref_spec, w - 1e-6)) / 2e-6
        assert fd == pytest.approx(gamma_prime(ref_spec, w), rel=1e-6)


class TestV:
    def test_equilibrium_is_zero(self, ref_spec, unit_quad):
        assert value(ref_spec, unit_quad, np.zeros(1), np.zeros(1)) == 0.0

    def test_reference_value(self, ref_spec, unit_quad):
        # gamma(0.5) = 7.5 + (2/3)*gamma1*0.5^{3/2} = 17.5 exactly
        v = value(ref_spec, unit_quad, np.array([1.0]), np.array([0.0]))
        assert v == pytest.approx(V_REF_X1_S0, rel=1e-12)

    def test_pure_s_part(self, ref_spec, unit_quad):
        v = value(ref_spec, unit_quad, np.zeros(1), np.ones(1))
        assert v == pytest.approx(2.0 * H_1_EPS1, rel=1e-14)

    def test_positive_away_from_equilibrium(self, ref_params):
        obj = random_log_cosh(3, 1.0, seed=5)
        spec = make_spec(ref_params, obj.L, obj.d)
        rng = np.random.default_rng(6)
        for _ in range(200):
            x = obj.x_star + rng.choice([-1, 1], 3) * 10.0 ** rng.uniform(-6, 2, 3)
            s = 10.0 ** rng.uniform(-6, 2, 3)
            assert value(spec, obj, x, s) > 0.0

    def test_radially_unbounded(self, ref_spec, unit_quad, ref_params):
        rng = np.random.default_rng(7)
        for _ in range(20):
            vx = rng.standard_normal(1)
            vs = np.abs(rng.standard_normal(1))
            vals = [value(ref_spec, unit_quad, unit_quad.x_star + t * vx, t * vs)
                    for t in (10.0, 1e2, 1e3, 1e4)]
            assert all(b > a for a, b in zip(vals, vals[1:]))
            assert vals[-1] > 10.0 * vals[0]

    def test_shape_mismatch(self, ref_spec, unit_quad):
        with pytest.raises(ValueError):
            value(ref_spec, unit_quad, np.zeros(2), np.zeros(2))


class TestDelta:
    def test_equilibrium_fixed_point(self, ref_spec, unit_quad):
        for u in (0.0, 0.7, 10.0):
            assert delta(ref_spec, unit_quad, np.zeros(1), np.zeros(1), u) == 0.0

    def test_pure_s_decay_matches_formula(self, ref_spec, unit_quad, ref_params):
        s = np.array([2.5])
        dv = delta(ref_spec, unit_quad, np.zeros(1), s, 3.0)
        expect = 2.0 * (h_func(ref_spec, (1 - ref_params.beta) * s[0])
                        - h_func(ref_spec, s[0]))
        assert dv == pytest.approx(expect, rel=1e-12)
        assert dv < 0.0

    def test_zero_input_never_increases(self, ref_params, catalog):
        rng = np.random.default_rng(8)
        for obj in catalog[:4]:
            spec = make_spec(ref_params, obj.L, obj.d)
            X = obj.x_star + rng.uniform(-10, 10, (200, obj.d))
            S = rng.uniform(0, 10, (200, obj.d))
            dv = delta(spec, obj, X, S, np.zeros(200))
            assert np.all(dv < 0.0)
