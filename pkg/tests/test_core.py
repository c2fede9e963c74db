import numpy as np
import pytest

from rmscert.core import (AlgoParams, State, as_step_input, inf_norm,
                          joint_inf_norm, validate_params)


class TestValidateParams:
    def test_reference_tuple_ok(self):
        # 0.1 + 0.1 = 0.2 < 2*1/1 = 2
        assert validate_params(AlgoParams(0.5, 1.0, 0.1, 0.1), L=1.0) is None

    def test_beta_boundary_rejected(self):
        assert validate_params(AlgoParams(1.0, 1.0, 0.1, 0.1), L=1.0) == "beta"
        assert validate_params(AlgoParams(0.0, 1.0, 0.1, 0.1), L=1.0) == "beta"

    def test_step_size_sum_rejected(self):
        # 1.5 + 0.6 = 2.1 >= 2
        assert validate_params(AlgoParams(0.5, 1.0, 1.5, 0.6), L=1.0) == "eta0+eta1"

    def test_first_violation_wins(self):
        # beta and eta0 both bad; beta is reported
        assert validate_params(AlgoParams(2.0, 1.0, -1.0, 0.1), L=1.0) == "beta"

    def test_individual_field_names(self):
        assert validate_params(AlgoParams(0.5, -1.0, 0.1, 0.1), L=1.0) == "epsilon"
        assert validate_params(AlgoParams(0.5, 1.0, 0.0, 0.1), L=1.0) == "eta0"
        assert validate_params(AlgoParams(0.5, 1.0, 0.1, -0.1), L=1.0) == "eta1"

    def test_nonfinite_fields_rejected(self):
        assert validate_params(AlgoParams(0.5, np.inf, 0.1, 0.1), L=1.0) == "epsilon"
        assert validate_params(AlgoParams(0.5, 1.0, np.nan, 0.1), L=1.0) == "eta0"

    def test_bad_L_raises(self):
        with pytest.raises(ValueError):
            validate_params(AlgoParams(0.5, 1.0, 0.1, 0.1), L=0.0)

    def test_monotone_in_eta0(self):
        # if (beta, eps, eta0, eta1) passes, any smaller positive eta0 passes
        rng = np.random.default_rng(7)
        for _ in range(200):
            beta = rng.uniform(0.01, 0.99)
            eps = 10.0 ** rng.uniform(-2, 2)
            L = 10.0 ** rng.uniform(-2, 2)
            eta0 = rng.uniform(0.0, 2.0 * eps / L)
            eta1 = rng.uniform(0.0, 2.0 * eps / L)
            p = AlgoParams(beta, eps, eta0, eta1)
            if validate_params(p, L) is None:
                smaller = AlgoParams(beta, eps, eta0 * rng.uniform(0.01, 1.0), eta1)
                assert validate_params(smaller, L) is None


class TestNorms:
    def test_inf_norm_examples(self):
        assert inf_norm([3.0, -4.0]) == 4.0
        assert inf_norm([0.0, 0.0, 0.0]) == 0.0
        assert inf_norm([1e-9, -2e-9]) == 2e-9

    def test_inf_norm_empty(self):
        with pytest.raises(ValueError, match="empty"):
            inf_norm([])

    def test_joint_inf_norm_examples(self):
        assert joint_inf_norm([1.0], [2.0]) == 2.0
        assert joint_inf_norm([5.0, -1.0], [0.0]) == 5.0
        assert joint_inf_norm([0.0], [0.0]) == 0.0

    def test_joint_inf_norm_empty_sides(self):
        assert joint_inf_norm([], [3.0]) == 3.0
        assert joint_inf_norm([3.0], []) == 3.0
        with pytest.raises(ValueError):
            joint_inf_norm([], [])

    def test_triangle_and_homogeneity(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            n = rng.integers(1, 12)
            a = rng.standard_normal(n) * 10.0 ** rng.uniform(-6, 6)
            b = rng.standard_normal(n) * 10.0 ** rng.uniform(-6, 6)
            c = rng.standard_normal()
            assert inf_norm(a + b) <= inf_norm(a) + inf_norm(b) + 1e-12
            assert inf_norm(c * a) == pytest.approx(abs(c) * inf_norm(a), rel=1e-12)


class TestState:
    def test_basic_construction(self):
        st = State([1.0, 2.0], [0.5, 0.0])
        assert st.d == 2
        assert st.s[1] == 0.0

    def test_clamps_tiny_negative_s(self):
        st = State([1.0], [-1e-16])
        assert st.s[0] == 0.0

    def test_rejects_negative_s(self):
        with pytest.raises(ValueError):
            State([1.0], [-1e-14])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            State([1.0, 2.0], [0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            State([np.nan], [0.0])
        with pytest.raises(ValueError):
            State([1.0], [np.inf])

    def test_vectors_are_locked(self):
        st = State([1.0], [0.0])
        with pytest.raises(ValueError):
            st.x[0] = 2.0

    def test_inputs_are_copied(self):
        x = np.array([1.0, 2.0])
        st = State(x, [0.0, 0.0])
        x[0] = 99.0
        assert st.x[0] == 1.0


class TestStepInput:
    def test_valid(self):
        assert as_step_input(0.0) == 0.0
        assert as_step_input(3) == 3.0

    def test_invalid(self):
        for bad in (-1e-9, np.nan, np.inf):
            with pytest.raises(ValueError):
                as_step_input(bad)
