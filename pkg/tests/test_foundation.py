import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from dunklkit.errors import DimensionMismatchError, DomainError
from dunklkit.foundation import (
    axis_c_h,
    bessel_j,
    gamma_fn,
    jacobi_normalization,
    make_multiplicity,
    modified_normalized_bessel,
    normalized_bessel,
    sphere_mass,
    verify_constants,
)

kappas = st.one_of(st.just(0.0), st.floats(min_value=0.05, max_value=4.0))


class TestGamma:
    def test_integers_are_factorials(self):
        assert gamma_fn(5.0) == pytest.approx(24.0)

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi))

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)
        with pytest.raises(DomainError):
            gamma_fn([1.0, -2.0])


class TestBessel:
    def test_value_at_zero(self):
        for alpha in (-0.5, 0.0, 0.5, 2.5):
            want = 1.0 / (2.0**alpha * math.gamma(alpha + 1.0))
            assert normalized_bessel(alpha, 0.0) == pytest.approx(want, rel=1e-14)

    def test_half_order_is_sinc(self):
        t = np.linspace(0.1, 30.0, 50)
        want = math.sqrt(2.0 / math.pi) * np.sin(t) / t
        np.testing.assert_allclose(normalized_bessel(0.5, t), want, rtol=1e-11, atol=1e-14)

    def test_modified_half_order_is_sinh(self):
        t = np.linspace(0.1, 20.0, 40)
        want = math.sqrt(2.0 / math.pi) * np.sinh(t) / t
        np.testing.assert_allclose(modified_normalized_bessel(0.5, t), want, rtol=1e-11)

    def test_keeps_array_shape(self):
        t = np.ones((3, 4))
        assert np.shape(normalized_bessel(1.0, t)) == (3, 4)

    @given(st.floats(min_value=-0.5, max_value=6.0), st.floats(min_value=1e-3, max_value=40.0))
    def test_matches_scipy(self, alpha, t):
        assert bessel_j(alpha, t) == pytest.approx(special.jv(alpha, t), abs=1e-11)

    def test_series_and_stable_agree_near_crossover(self):
        t = np.linspace(8.0, 12.0, 9)
        np.testing.assert_allclose(bessel_j(1.5, t, "series"), bessel_j(1.5, t, "stable"), atol=1e-11)

    def test_domain(self):
        with pytest.raises(DomainError):
            normalized_bessel(-1.0, 1.0)
        with pytest.raises(DomainError):
            normalized_bessel(0.5, -1.0)
        with pytest.raises(ValueError):
            bessel_j(0.5, 1.0, method="fast")


class TestMultiplicity:
    def test_classical_line(self):
        m = make_multiplicity(1, (0.0,))
        assert m.c_h == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))
        assert m.a_k == pytest.approx(0.5)
        assert m.big_n == 1.0
        assert m.d_k == pytest.approx(2.0)
        assert m.is_classical

    def test_classical_plane(self):
        m = make_multiplicity(2, (0.0, 0.0))
        assert m.c_h == pytest.approx(1.0 / (2.0 * math.pi))
        assert sphere_mass(m) == pytest.approx(2.0 * math.pi)
        assert m.ball_mass(2.0) == pytest.approx(4.0 * math.pi)

    def test_derived_exponents(self, mult2):
        assert mult2.gamma_k == 1.5
        assert mult2.lambda_k == 1.5
        assert mult2.big_n == 5.0

    @given(st.lists(kappas, min_size=1, max_size=3))
    def test_constants_cross_check(self, kappa):
        m = make_multiplicity(len(kappa), kappa, verify=False)
        assert max(verify_constants(m).values()) < 1e-9

    @pytest.mark.parametrize("kappa", [(0.5, 1.0), (0.0, 0.5), (2.0, 0.25)])
    def test_circle_integral_of_the_weight(self, kappa):
        m = make_multiplicity(2, kappa, verify=False)
        assert verify_constants(m)["sphere_quad"] < 1e-10
        theta = np.linspace(0.0, 2.0 * np.pi, 200_000, endpoint=False)
        h2 = np.abs(np.cos(theta)) ** (2 * kappa[0]) * np.abs(np.sin(theta)) ** (2 * kappa[1])
        assert 2.0 * np.pi * np.mean(h2) == pytest.approx(1.0 / m.a_k, rel=1e-5)

    def test_circle_check_only_in_two_dimensions(self, mult1):
        assert "sphere_quad" not in verify_constants(mult1)

    @given(kappas)
    def test_c_h_factorizes(self, k):
        m = make_multiplicity(2, (k, 0.25))
        assert m.c_h == pytest.approx(axis_c_h(k) * axis_c_h(0.25), rel=1e-13)

    def test_weight(self, mult2):
        x = np.array([[2.0, 3.0], [0.0, 1.0]])
        np.testing.assert_allclose(mult2.weight(x), [2.0 * 9.0, 0.0])
        with pytest.raises(DimensionMismatchError):
            mult2.weight(np.ones(3))

    def test_rejects_bad_input(self):
        with pytest.raises(DimensionMismatchError):
            make_multiplicity(2, (1.0,))
        with pytest.raises(DomainError):
            make_multiplicity(1, (-0.5,))
        with pytest.raises(DomainError):
            make_multiplicity(0, ())

    def test_matches(self, mult1):
        assert mult1.matches(make_multiplicity(1, (0.5,)))
        assert not mult1.matches(make_multiplicity(1, (1.0,)))


def test_jacobi_normalization():
    assert jacobi_normalization(1.0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        jacobi_normalization(0.0)
