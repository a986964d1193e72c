import numpy as np
import pytest

from dunklkit.errors import DimensionMismatchError
from dunklkit.foundation import make_multiplicity
from dunklkit.grid import load_grid, make_grid, radial_profile, sample, save_grid, zeros_like

from .conftest import gaussian


class TestGridFunction:
    def test_shape_and_points(self, gauss2):
        assert gauss2.shape == (48, 48)
        pts = gauss2.points()
        assert pts.shape == (48 * 48, 2)
        np.testing.assert_allclose(gauss2.values.ravel(), gaussian(pts))

    def test_weights_integrate_the_gaussian(self, gauss2):
        # c_h int e^{-|x|^2/2} h^2 = 1
        total = gauss2.mult.c_h * np.sum(gauss2.values * gauss2.quad_weights)
        assert total == pytest.approx(1.0, rel=1e-10)

    def test_call_uses_the_exact_function(self, gauss1):
        x = np.array([[0.123], [2.5]])
        np.testing.assert_allclose(gauss1(x), gaussian(x))

    def test_call_interpolates_without_a_function(self, gauss1):
        bare = gauss1.with_values(gauss1.values)
        assert bare.func is None
        assert bare(np.array([0.5])) == pytest.approx(gaussian(np.array([0.5])), abs=1e-2)
        assert bare(np.array([50.0])) == 0.0

    def test_with_values_checks_the_shape(self, gauss1):
        with pytest.raises(DimensionMismatchError):
            gauss1.with_values(np.zeros(3))

    def test_scaled_and_zeros(self, gauss1):
        doubled = gauss1.scaled(2.0)
        np.testing.assert_allclose(doubled.values, 2.0 * gauss1.values)
        assert doubled(np.array([0.0])) == pytest.approx(2.0)
        assert not np.any(zeros_like(gauss1).values)

    def test_same_grid(self, gauss1, mult1):
        other = sample(mult1, gaussian, 12.0, 96)
        assert gauss1.same_grid(other)
        assert not gauss1.same_grid(sample(mult1, gaussian, 10.0, 96))

    def test_make_grid_is_symmetric(self, mult2):
        axes, weights = make_grid(mult2, 5.0, 20)
        assert len(axes) == 2
        for a, w in zip(axes, weights):
            np.testing.assert_allclose(a, -a[::-1])
            np.testing.assert_allclose(w, w[::-1])


class TestRadialProfile:
    def test_gaussian_mass_is_one(self, mult2):
        p = radial_profile(mult2, lambda r: np.exp(-np.asarray(r) ** 2 / 2.0))
        assert p.mass() == pytest.approx(1.0, rel=1e-10)

    def test_mapped_rule(self, mult1):
        p = radial_profile(mult1, lambda r: np.exp(-np.asarray(r) ** 2 / 2.0), scale=1.0, n=128)
        assert p.rule.kind == "mapped"
        assert p.mass() == pytest.approx(1.0, rel=1e-8)

    def test_call_uses_the_norm(self, mult2):
        p = radial_profile(mult2, lambda r: np.asarray(r) ** 2, r_max=1.0)
        assert p(np.array([3.0, 4.0])) == pytest.approx(25.0)

    def test_compact_support_matches_the_grid(self, mult1):
        p = radial_profile(mult1, lambda r: np.maximum(1.0 - np.asarray(r) ** 2, 0.0), support=1.0, endpoint_power=1.0)
        g = p.to_grid(2.0, 200)
        grid_mass = mult1.c_h * np.sum(g.values * g.quad_weights)
        assert p.mass() == pytest.approx(grid_mass, rel=1e-3)


class TestPersistence:
    def test_save_and_load(self, tmp_path, mult2):
        f = sample(mult2, gaussian, 6.0, 12, label="gauss")
        save_grid(f, tmp_path / "g")
        back = load_grid(tmp_path / "g")
        assert back.same_grid(f)
        assert back.label == "gauss"
        np.testing.assert_allclose(back.values, f.values, rtol=1e-15)

    def test_mismatched_table_is_rejected(self, tmp_path):
        mult = make_multiplicity(1, (0.5,))
        f = sample(mult, gaussian, 6.0, 12)
        save_grid(f, tmp_path / "g")
        csv = tmp_path / "g.csv"
        lines = csv.read_text().splitlines()
        csv.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(DimensionMismatchError):
            load_grid(tmp_path / "g")
