import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from dunklkit.errors import DimensionMismatchError
from dunklkit.foundation import make_multiplicity
from dunklkit.kernel import (
    dunkl_derivative_z2d,
    dunkl_laplacian_z2d,
    gaussian_identity_residual,
    intertwine_z2d,
    kernel_1d,
    kernel_real_closed,
    kernel_real_z2d,
    kernel_z2d,
)

coords = st.floats(min_value=-3.0, max_value=3.0)
kappas = st.one_of(st.just(0.0), st.floats(min_value=0.05, max_value=3.0))


class TestKernel:
    def test_classical_is_the_exponential(self):
        x = np.linspace(-3.0, 3.0, 7)
        np.testing.assert_allclose(kernel_1d(0.0, x, 1.3), np.exp(-1.3j * x))

    def test_half_kappa_reduces_to_j0_j1(self):
        t = 2.0
        assert kernel_1d(0.5, 1.0, t) == pytest.approx(special.jv(0, t) - 1j * special.jv(1, t), abs=1e-13)

    @given(kappas, coords)
    def test_value_one_at_origin(self, k, y):
        assert kernel_1d(k, 0.0, y) == pytest.approx(1.0, abs=1e-13)

    @given(kappas, coords, coords)
    def test_bounded_by_one(self, k, x, y):
        assert abs(kernel_1d(k, x, y)) <= 1.0 + 1e-12

    @given(kappas, coords, coords, st.floats(min_value=-2.0, max_value=2.0))
    def test_symmetry_and_homogeneity(self, k, x, y, c):
        assert kernel_1d(k, x, y) == pytest.approx(kernel_1d(k, y, x), abs=1e-12)
        assert kernel_1d(k, c * x, y) == pytest.approx(kernel_1d(k, x, c * y), abs=1e-12)

    def test_product_over_axes(self, mult2):
        x = np.array([0.7, -1.2])
        y = np.array([1.1, 0.4])
        want = kernel_1d(0.5, x[0], y[0]) * kernel_1d(1.0, x[1], y[1])
        assert kernel_z2d(mult2, x, y) == pytest.approx(want, abs=1e-14)

    def test_rejects_wrong_dimension(self, mult2):
        with pytest.raises(DimensionMismatchError):
            kernel_z2d(mult2, np.ones(3), np.ones(2))


class TestRealKernel:
    @pytest.mark.parametrize("kappa", [(0.5,), (2.5,), (0.0, 1.0), (0.5, 2.5)])
    def test_intertwining_route_matches_closed_form(self, kappa):
        mult = make_multiplicity(len(kappa), kappa)
        rng = np.random.default_rng(3)
        x = rng.uniform(-2.0, 2.0, size=(6, mult.d))
        y = rng.uniform(-2.0, 2.0, size=(6, mult.d))
        np.testing.assert_allclose(kernel_real_z2d(mult, x, y), kernel_real_closed(mult, x, y), rtol=1e-9)

    def test_classical_is_the_exponential(self):
        mult = make_multiplicity(2, (0.0, 0.0))
        x, y = np.array([0.3, -1.0]), np.array([2.0, 0.5])
        assert kernel_real_z2d(mult, x, y) == pytest.approx(np.exp(x @ y))


class TestIntertwining:
    @given(kappas, coords)
    def test_linear_and_quadratic_monomials(self, k, x):
        mult = make_multiplicity(1, (k,))
        pt = np.array([x])
        assert intertwine_z2d(lambda p: p[..., 0], mult, pt) == pytest.approx(x / (2.0 * k + 1.0), abs=1e-10)
        assert intertwine_z2d(lambda p: p[..., 0] ** 2, mult, pt) == pytest.approx(x * x / (2.0 * k + 1.0), abs=1e-10)

    def test_constants_are_fixed(self, mult2):
        pts = np.array([[0.3, 1.0], [-2.0, 0.5]])
        np.testing.assert_allclose(intertwine_z2d(lambda p: np.ones(p.shape[:-1]), mult2, pts), 1.0, rtol=1e-12)

    def test_exponential_gives_the_kernel(self, mult2):
        x = np.array([0.8, -0.6])
        y = np.array([1.5, 1.1])
        got = intertwine_z2d(lambda p: np.exp(p @ y), mult2, x)
        assert got == pytest.approx(kernel_real_closed(mult2, x, y), rel=1e-9)


class TestDunklOperators:
    @given(kappas, coords)
    def test_derivative_of_monomials(self, k, x):
        mult = make_multiplicity(1, (k,))
        pt = np.array([x])
        assert dunkl_derivative_z2d(lambda p: p[..., 0], mult, 0, pt) == pytest.approx(1.0 + 2.0 * k, abs=1e-6)
        assert dunkl_derivative_z2d(lambda p: p[..., 0] ** 2, mult, 0, pt) == pytest.approx(2.0 * x, abs=1e-6)

    def test_derivative_on_the_hyperplane(self, mult2):
        pt = np.array([0.0, 0.7])
        got = dunkl_derivative_z2d(lambda p: p[..., 0], mult2, 0, pt)
        assert got == pytest.approx(2.0, abs=1e-6)

    def test_laplacian_of_the_gaussian(self, mult2):
        rng = np.random.default_rng(0)
        pts = rng.uniform(-2.0, 2.0, size=(5, 2))

        def g(p):
            return np.exp(-np.sum(p * p, axis=-1) / 2.0)

        want = (np.sum(pts * pts, axis=-1) - mult2.big_n) * g(pts)
        np.testing.assert_allclose(dunkl_laplacian_z2d(g, mult2, pts), want, atol=1e-4)

    def test_axis_out_of_range(self, mult2):
        with pytest.raises(DimensionMismatchError):
            dunkl_derivative_z2d(lambda p: p[..., 0], mult2, 2, np.zeros(2))


class TestGaussianIdentity:
    @pytest.mark.parametrize("imaginary", [False, True])
    def test_small_residual(self, mult2, imaginary):
        z = np.array([0.4, -0.3])
        w = np.array([0.7, 0.2])
        assert gaussian_identity_residual(mult2, z, w, imaginary=imaginary) < 1e-8
