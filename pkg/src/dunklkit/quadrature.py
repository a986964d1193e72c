"""Quadrature rules: Gauss-Jacobi for V_k, weighted box grids, radial and sphere rules."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError
from .foundation import jacobi_normalization

DEFAULT_JACOBI_ORDER = 64


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class JacobiRule:
    """Gauss rule for b_k (1-u^2)^(k-1) du on [-1, 1].

    `weights` absorb b_k (1-u^2)^(k-1); the (1+u) factor of the intertwining
    measure is applied by `measure_weights`.
    """

    kappa: float
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def measure_weights(self):
        return self.weights * (1.0 + self.nodes)

    def integrate(self, values):
        """Sum values(u_k) * Phi_k(u_k) du along the last axis."""
        return np.asarray(values) @ self.measure_weights


@lru_cache(maxsize=256)
def jacobi_rule(kappa, order=DEFAULT_JACOBI_ORDER):
    if kappa <= 0:
        raise DomainError("kappa = 0 has no Jacobi rule; use the point-mass limit")
    if order < 1:
        raise DomainError(f"rule order must be positive, got {order}")
    nodes, weights = special.roots_jacobi(int(order), kappa - 1.0, kappa - 1.0)
    return JacobiRule(
        kappa=float(kappa),
        nodes=_frozen(nodes),
        weights=_frozen(weights * jacobi_normalization(kappa)),
        order=int(order),
    )


_POINT_MASS = (_frozen([1.0]), _frozen([1.0]))


def intertwining_axis(kappa, order=DEFAULT_JACOBI_ORDER, rule=None):
    """(nodes, weights) of the measure b_k (1+u)(1-u^2)^(k-1) du; a point mass at u=1 when k=0."""
    if kappa == 0:
        return _POINT_MASS
    rule = rule if rule is not None else jacobi_rule(kappa, order)
    return rule.nodes, rule.measure_weights


@lru_cache(maxsize=256)
def half_axis_rule(kappa, radius, n):
    """Rule for |x|^(2k) dx on [-radius, radius], Gauss-Jacobi on each half.

    Nodes are symmetric about 0 and never hit it; n is rounded down to even.
    """
    n_half = int(n) // 2
    if n_half < 1:
        raise DomainError(f"axis needs at least 2 nodes, got {n}")
    if radius <= 0:
        raise DomainError(f"truncation radius must be positive, got {radius}")
    u, w = special.roots_jacobi(n_half, 0.0, 2.0 * kappa)
    x = radius * (1.0 + u) / 2.0
    wx = w * (radius / 2.0) ** (2.0 * kappa + 1.0)
    nodes = np.concatenate([-x[::-1], x])
    weights = np.concatenate([wx[::-1], wx])
    return _frozen(nodes), _frozen(weights)


@dataclass(frozen=True, eq=False)
class RadialRule:
    """Nodes/weights for the integral of g(r) r^(2 lam + 1) dr."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    extent: float

    def integrate(self, values):
        return np.asarray(values) @ self.weights


def radial_rule(lam, n, r_max=None, scale=None, endpoint_power=0.0):
    """Radial rule for r^(2 lam + 1) dr.

    With `r_max` the range is [0, r_max] (Gauss-Jacobi in r). `endpoint_power`
    b declares that the integrand carries a (1 - r/r_max)^b factor; the rule
    then resolves it exactly. With `scale` L instead, the half line is mapped
    by r = L(1+u)/(1-u), which suits algebraically decaying profiles.
    """
    if lam < -0.5:
        raise DomainError(f"radial exponent needs lambda >= -1/2, got {lam}")
    n = int(n)
    if (r_max is None) == (scale is None):
        raise ValueError("pass exactly one of r_max or scale")
    p = 2.0 * lam + 1.0
    if r_max is not None:
        if r_max <= 0:
            raise DomainError(f"r_max must be positive, got {r_max}")
        u, w = special.roots_jacobi(n, float(endpoint_power), p)
        r = r_max * (1.0 + u) / 2.0
        weights = w * (r_max / 2.0) ** (p + 1.0)
        if endpoint_power:
            weights = weights / (1.0 - u) ** endpoint_power
        return RadialRule(_frozen(r), _frozen(weights), "truncated", float(r_max))
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    u, w = special.roots_jacobi(n, 0.0, p)
    r = scale * (1.0 + u) / (1.0 - u)
    weights = w * 2.0 * scale ** (p + 1.0) / (1.0 - u) ** (p + 2.0)
    return RadialRule(_frozen(r), _frozen(weights), "mapped", float(scale))


def _quadrant_angles(a, b, n):
    """Angles/weights for |cos t|^(2a) |sin t|^(2b) dt over [0, 2 pi)."""
    u, w = special.roots_jacobi(int(n), a - 0.5, b - 0.5)
    s = (1.0 + u) / 2.0
    theta = np.arcsin(np.sqrt(s))
    wq = w * 2.0 ** (-(a + b + 1.0))
    angles = np.concatenate([theta, math.pi - theta, math.pi + theta, 2.0 * math.pi - theta])
    return angles, np.tile(wq, 4)


@lru_cache(maxsize=64)
def sphere_rule(kappa, n=32):
    """Points on S^{d-1} with weights for h_k^2 d(omega), d in {1, 2, 3}.

    Weights sum to a_k^-1. Each quadrant uses a Gauss-Jacobi rule in sin^2,
    which absorbs the |x_i|^(2 k_i) factors exactly.
    """
    kappa = tuple(float(k) for k in kappa)
    d = len(kappa)
    if d == 1:
        return _frozen([[1.0], [-1.0]]), _frozen([1.0, 1.0])
    if d == 2:
        theta, w = _quadrant_angles(kappa[0], kappa[1], n)
        points = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return _frozen(points), _frozen(w)
    if d == 3:
        theta, wt = _quadrant_angles(kappa[0], kappa[1], n)
        c = kappa[0] + kappa[1]
        e = kappa[2]
        u, wz = special.roots_jacobi(int(n), c, e - 0.5)
        z = np.sqrt((1.0 + u) / 2.0)
        wz = wz * 2.0 ** (-(c + e + 1.5))
        z = np.concatenate([-z[::-1], z])
        wz = np.concatenate([wz[::-1], wz])
        rho = np.sqrt(1.0 - z**2)
        points = np.stack(
            [
                np.outer(rho, np.cos(theta)).ravel(),
                np.outer(rho, np.sin(theta)).ravel(),
                np.repeat(z, theta.size),
            ],
            axis=-1,
        )
        return _frozen(points), _frozen(np.outer(wz, wt).ravel())
    raise DomainError(f"sphere quadrature is provided for d in {{1, 2, 3}}, got d={d}")


def box_rule(kappa, radius, n):
    """Per-axis (nodes, weights) for h_k^2 dx on the box [-radius, radius]^d."""
    return [half_axis_rule(float(k), float(radius), int(n)) for k in kappa]
