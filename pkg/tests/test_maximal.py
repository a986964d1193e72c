import numpy as np
import pytest

from dunklkit.errors import DimensionMismatchError, DomainError, HypothesisViolationError
from dunklkit.foundation import make_multiplicity
from dunklkit.grid import radial_profile, sample
from dunklkit.maximal import (
    ball_averages,
    default_levels,
    derivative_moment,
    grid_schedule,
    majorization_check,
    maximal_function,
    maximal_on_grid,
    poisson_maximal,
    radius_schedule,
    reflect,
    reflection_symmetrize,
    refinement_shift,
    weak_type_experiment,
)
from dunklkit.summability import heat_kernel, make_kernel, skewed_kernel
from dunklkit.transform import lp_norm

from .conftest import gaussian

POINTS = np.array([[0.0], [0.8], [-2.5]])


@pytest.fixture
def f(mult1):
    return sample(mult1, gaussian, 8.0, 64, label="gauss")


@pytest.fixture
def g(mult1):
    return sample(mult1, lambda x: np.exp(-((x[..., 0] - 1.0) ** 2)), 8.0, 64, label="bump")


@pytest.fixture
def sched(f):
    return grid_schedule(f, 30)


class TestSchedule:
    def test_grid_schedule_spans_cell_to_twice_the_box(self, f):
        s = grid_schedule(f, 10)
        assert len(s) == 10
        assert s.radii[0] == pytest.approx(2.0 * 8.0 / 64)
        assert s.radii[-1] == pytest.approx(16.0)
        np.testing.assert_allclose(s.ball_masses, f.mult.ball_mass(s.radii))

    def test_validation(self, mult1):
        with pytest.raises(DomainError):
            radius_schedule(mult1, 1.0, 0.5)
        with pytest.raises(DomainError):
            radius_schedule(mult1, 0.1, 1.0, count=0)


class TestBallAverages:
    def test_nonnegative_for_nonnegative_input(self, f, sched):
        assert np.all(ball_averages(f, POINTS, sched) >= 0.0)

    def test_linear_in_the_function(self, f, g, sched):
        both = f.with_values(f.values + 2.0 * g.values)
        np.testing.assert_allclose(
            ball_averages(both, POINTS, sched),
            ball_averages(f, POINTS, sched) + 2.0 * ball_averages(g, POINTS, sched),
            rtol=1e-10,
            atol=1e-14,
        )

    def test_shape(self, f, sched):
        assert ball_averages(f, POINTS, sched).shape == (3, len(sched))

    def test_constant_function(self, mult1):
        one = sample(mult1, lambda x: np.ones(np.shape(x)[:-1]), 8.0, 128)
        s = radius_schedule(mult1, 2.0, 4.0, count=2, cell=0.5)
        avg = ball_averages(one, np.array([0.0]), s)
        np.testing.assert_allclose(avg, 1.0, rtol=0.05)

    def test_complex_input_is_rejected(self, f, sched):
        with pytest.raises(DomainError):
            ball_averages(f.with_values(f.values + 0j), POINTS, sched)


class TestMaximalFunction:
    def test_subadditive(self, f, g, sched):
        total = maximal_function(f.with_values(f.values + g.values), POINTS, sched)
        parts = maximal_function(f, POINTS, sched) + maximal_function(g, POINTS, sched)
        assert np.all(total <= parts + 1e-12)

    def test_additive_for_multiples(self, f, sched):
        twice = maximal_function(f.with_values(3.0 * f.values), POINTS, sched)
        np.testing.assert_allclose(twice, maximal_function(f, POINTS, sched) + maximal_function(f.scaled(2.0), POINTS, sched))

    def test_homogeneous(self, f, sched):
        np.testing.assert_allclose(
            maximal_function(f.scaled(-2.5), POINTS, sched), 2.5 * maximal_function(f, POINTS, sched), rtol=1e-12
        )

    def test_dominates_the_function(self, f, sched):
        assert maximal_function(f, np.array([0.0]), sched) >= 0.85

    def test_on_grid(self, f, sched):
        mf = maximal_on_grid(f, sched)
        assert mf.same_grid(f)
        assert mf.label == "M gauss"

    def test_refinement_is_stable(self, f):
        assert refinement_shift(f, POINTS, count=40) < 0.02


class TestWeakType:
    def test_constant_is_bounded(self, f, sched):
        out = weak_type_experiment(f, sched=sched)
        assert len(out["rows"]) == 9
        assert 0.0 < out["constant"] < 10.0
        assert out["constant"] == max(row["ratio"] for row in out["rows"])

    def test_level_sets_shrink(self, f, sched):
        rows = weak_type_experiment(f, levels=[0.01, 0.1, 0.5], sched=sched)["rows"]
        masses = [row["levelset_mass"] for row in rows]
        assert masses[0] >= masses[1] >= masses[2] > 0.0

    def test_default_levels(self, f, sched):
        levels = default_levels(maximal_on_grid(f, sched))
        assert levels.size == 9
        assert np.all(np.diff(levels) > 0)

    def test_zero_function(self, f, sched):
        with pytest.raises(DomainError):
            weak_type_experiment(f.with_values(np.zeros(f.shape)), levels=[0.1], sched=sched)

    def test_level_sets_scale_with_the_function(self, g, sched):
        levels = np.array([0.01, 0.1, 0.3])
        once = weak_type_experiment(g, levels=levels, sched=sched)
        twice = weak_type_experiment(g.with_values(2.0 * g.values), levels=2.0 * levels, sched=sched)
        for a, b in zip(once["rows"], twice["rows"]):
            assert b["levelset_mass"] == pytest.approx(a["levelset_mass"], rel=1e-12)
            assert b["ratio"] == pytest.approx(a["ratio"], rel=1e-12)
        assert twice["constant"] == pytest.approx(once["constant"], rel=1e-12)


class TestMajorization:
    def test_gaussian_moment(self, mult1):
        # int r^{2 lam + 2} r e^{-r^2/2} dr = 2^{lam+1} Gamma(lam + 2); lam = 0 here
        assert derivative_moment(mult1, lambda r: np.exp(-np.asarray(r) ** 2 / 2.0)) == pytest.approx(2.0, rel=1e-6)

    def test_poisson_moment_is_finite(self, mult2):
        k = make_kernel(mult2, "poisson", 1.0)
        assert np.isfinite(derivative_moment(mult2, k.profile.f0))

    def test_slow_decay_is_rejected(self, mult1):
        with pytest.raises(HypothesisViolationError):
            derivative_moment(mult1, lambda r: 1.0 / (1.0 + np.asarray(r)))

    def test_heat_kernel_is_majorized(self, f, sched):
        out = majorization_check(f, heat_kernel(f.mult, 0.5), (1.0, 0.5, 0.25), POINTS, sched)
        assert len(out["rows"]) == 3
        assert 0.0 < out["constant"] <= 2.0
        assert out["moment"] > 0.0

    def test_non_radial_kernel_is_rejected(self, f, sched):
        with pytest.raises(DomainError):
            majorization_check(f, skewed_kernel(f.mult), (1.0,), POINTS, sched)

    def test_mismatched_kernel(self, f, sched):
        other = make_multiplicity(1, (1.5,))
        with pytest.raises(DimensionMismatchError):
            majorization_check(f, heat_kernel(other, 0.5), (1.0,), POINTS, sched)

    def test_poisson_maximal_dominates_pointwise(self, f, sched):
        out = poisson_maximal(f, POINTS, (2.0, 1.0, 0.5, 0.1), sched)
        assert np.all(out["p_star"] > 0.0)
        assert np.all(np.isfinite(out["ratio"]))


class TestReflections:
    def test_reflect_flips_the_axis(self, mult2):
        h = sample(mult2, lambda x: x[..., 0] + 2.0 * x[..., 1], 3.0, 6)
        flipped = reflect(h, [-1.0, 1.0])
        pts = h.points()
        want = -pts[:, 0] + 2.0 * pts[:, 1]
        np.testing.assert_allclose(flipped.values.ravel(), want)
        assert flipped(np.array([1.0, 1.0])) == pytest.approx(1.0)

    def test_symmetrize_kills_odd_parts(self, mult2):
        h = sample(mult2, lambda x: x[..., 0] * np.exp(-np.sum(x * x, axis=-1)), 3.0, 6)
        np.testing.assert_allclose(reflection_symmetrize(h, [0]).values, 0.0, atol=1e-15)
        np.testing.assert_allclose(reflection_symmetrize(h, [1]).values, h.values)

    def test_no_axes_is_the_identity(self, f):
        assert reflection_symmetrize(f, []) is f

    def test_validation(self, f):
        with pytest.raises(DomainError):
            reflect(f, [2.0])
        with pytest.raises(DomainError):
            reflection_symmetrize(f, [1])

    def test_maximal_function_commutes_with_reflections(self, g, sched):
        flipped = reflect(g, [-1.0])
        np.testing.assert_allclose(maximal_function(flipped, POINTS, sched), maximal_function(g, -POINTS, sched), rtol=1e-10)

    def test_maximal_function_commutes_with_reflections_in_the_plane(self, mult2):
        h = sample(mult2, lambda x: np.exp(-np.sum((x - [0.7, -0.3]) ** 2, axis=-1)), 4.0, 16)
        sched = grid_schedule(h, 10)
        signs = np.array([-1.0, 1.0])
        pts = np.array([[0.0, 0.0], [0.5, -1.0], [-1.5, 0.25]])
        np.testing.assert_allclose(
            maximal_function(reflect(h, signs), pts, sched), maximal_function(h, pts * signs, sched), rtol=1e-10
        )

    def test_symmetrizing_does_not_raise_the_l1_norm(self, g, mult2):
        assert lp_norm(reflection_symmetrize(g, [0]), 1) <= lp_norm(g, 1) * (1.0 + 1e-12)
        h = sample(mult2, lambda x: np.sin(2.0 * x[..., 0] + x[..., 1]) * np.exp(-np.sum(x * x, axis=-1)), 4.0, 16)
        sym = reflection_symmetrize(h, [0, 1])
        assert lp_norm(sym, 1) < lp_norm(h, 1)
