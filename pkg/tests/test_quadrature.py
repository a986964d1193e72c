import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from dunklkit.errors import DomainError
from dunklkit.foundation import make_multiplicity
from dunklkit.quadrature import (
    box_rule,
    half_axis_rule,
    intertwining_axis,
    jacobi_rule,
    radial_rule,
    sphere_rule,
)

positive_kappas = st.floats(min_value=0.1, max_value=4.0)


class TestJacobiRule:
    @given(positive_kappas)
    def test_measure_is_a_probability(self, k):
        rule = jacobi_rule(k, 32)
        assert rule.integrate(np.ones(rule.order)) == pytest.approx(1.0, rel=1e-12)
        assert np.sum(rule.weights) == pytest.approx(1.0, rel=1e-12)

    @given(positive_kappas)
    def test_first_moment(self, k):
        # int u b_k (1+u)(1-u^2)^(k-1) du = 1 / (2k + 1)
        rule = jacobi_rule(k, 32)
        assert rule.integrate(rule.nodes) == pytest.approx(1.0 / (2.0 * k + 1.0), rel=1e-12)

    def test_point_mass_at_zero_kappa(self):
        nodes, weights = intertwining_axis(0.0)
        assert list(nodes) == [1.0]
        assert list(weights) == [1.0]

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            jacobi_rule(0.0)
        with pytest.raises(DomainError):
            jacobi_rule(1.0, 0)

    def test_rules_are_read_only(self):
        rule = jacobi_rule(0.5, 8)
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0


class TestAxisRules:
    @given(st.floats(min_value=0.0, max_value=3.0), st.floats(min_value=0.5, max_value=20.0))
    def test_half_axis_mass(self, k, radius):
        nodes, weights = half_axis_rule(k, radius, 40)
        want = 2.0 * radius ** (2.0 * k + 1.0) / (2.0 * k + 1.0)
        assert np.sum(weights) == pytest.approx(want, rel=1e-12)
        np.testing.assert_allclose(nodes, -nodes[::-1])
        assert np.all(nodes != 0.0)

    def test_odd_node_count_rounds_down(self):
        nodes, _ = half_axis_rule(0.5, 1.0, 9)
        assert nodes.size == 8

    def test_box_rule_has_one_axis_per_kappa(self):
        rules = box_rule((0.5, 1.0, 0.0), 4.0, 10)
        assert len(rules) == 3
        assert all(nodes.size == 10 for nodes, _ in rules)

    def test_rejects_degenerate_axes(self):
        with pytest.raises(DomainError):
            half_axis_rule(0.5, 1.0, 1)
        with pytest.raises(DomainError):
            half_axis_rule(0.5, -1.0, 10)


class TestRadialRule:
    @given(st.floats(min_value=-0.5, max_value=4.0))
    def test_truncated_polynomial(self, lam):
        rule = radial_rule(lam, 16, r_max=2.0)
        want = 2.0 ** (2.0 * lam + 2.0) / (2.0 * lam + 2.0)
        assert rule.integrate(np.ones(16)) == pytest.approx(want, rel=1e-12)
        assert rule.kind == "truncated"

    @given(st.floats(min_value=-0.5, max_value=4.0))
    def test_mapped_gaussian(self, lam):
        rule = radial_rule(lam, 128, scale=1.0)
        want = 2.0**lam * math.gamma(lam + 1.0)
        assert rule.integrate(np.exp(-rule.nodes**2 / 2.0)) == pytest.approx(want, rel=1e-8)

    @given(st.floats(min_value=0.0, max_value=3.0), st.floats(min_value=0.2, max_value=3.0))
    def test_endpoint_power_resolves_the_factor(self, lam, b):
        rule = radial_rule(lam, 24, r_max=1.0, endpoint_power=b)
        values = (1.0 - rule.nodes) ** b
        assert rule.integrate(values) == pytest.approx(special.beta(2.0 * lam + 2.0, b + 1.0), rel=1e-10)

    def test_needs_exactly_one_range(self):
        with pytest.raises(ValueError):
            radial_rule(0.0, 8)
        with pytest.raises(ValueError):
            radial_rule(0.0, 8, r_max=1.0, scale=1.0)

    def test_rejects_small_lambda(self):
        with pytest.raises(DomainError):
            radial_rule(-1.0, 8, r_max=1.0)


class TestSphereRule:
    @pytest.mark.parametrize("kappa", [(0.0,), (1.5,), (0.0, 0.0), (0.5, 1.0), (0.5, 0.0, 2.0), (1.0, 1.0, 1.0)])
    def test_total_mass(self, kappa):
        mult = make_multiplicity(len(kappa), kappa)
        points, weights = sphere_rule(kappa, 24)
        assert np.sum(weights) == pytest.approx(1.0 / mult.a_k, rel=1e-12)
        np.testing.assert_allclose(np.linalg.norm(points, axis=-1), 1.0, rtol=1e-14)

    def test_weighted_second_moment(self):
        # int x_1^2 h^2 dw = a_k^-1 (k_1 + 1/2) / (gamma + d/2)
        kappa = (0.5, 1.0)
        mult = make_multiplicity(2, kappa)
        points, weights = sphere_rule(kappa, 24)
        want = (1.0 / mult.a_k) * (kappa[0] + 0.5) / (mult.gamma_k + 1.0)
        assert np.sum(points[:, 0] ** 2 * weights) == pytest.approx(want, rel=1e-12)

    def test_higher_dimensions_are_not_provided(self):
        with pytest.raises(DomainError):
            sphere_rule((0.5,) * 4)
