"""The Dunkl kernel for Z_2^d, the intertwining operator V_k and the Dunkl operators."""

import math

import numpy as np

from .errors import DimensionMismatchError
from .foundation import axis_c_h, modified_normalized_bessel, normalized_bessel
from .log import debug, warn
from .quadrature import DEFAULT_JACOBI_ORDER, JacobiRule, box_rule, intertwining_axis

CONVERGENCE_TOL = 1e-10
MAX_ORDER = {1: 2048, 2: 512, 3: 96}

# Central-difference steps: first derivatives balance truncation against roundoff at
# eps^(1/3); the outer derivative of a composition uses eps^(1/4).
FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)
FD_STEP_OUTER = np.finfo(float).eps ** 0.25
REFLECTION_TOL = 1e-6


def as_points(mult, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != mult.d:
        raise DimensionMismatchError(f"expected points of dimension {mult.d}, got shape {x.shape}")
    return x


def _complex_or_array(out):
    out = np.asarray(out)
    return complex(out) if out.ndim == 0 else out


def _real_or_array(out):
    out = np.asarray(out)
    return out.item() if out.ndim == 0 else out


def kernel_1d(kappa, x, y):
    """E(x, -iy) for Z_2; broadcasts over x and y."""
    t = np.multiply(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if kappa == 0:
        return np.exp(-1j * t)
    c = math.gamma(kappa + 0.5) * 2.0 ** (kappa - 0.5)
    at = np.abs(t)
    even = np.asarray(normalized_bessel(kappa - 0.5, at))
    odd = np.asarray(normalized_bessel(kappa + 0.5, at))
    return c * (even - 1j * t * odd)


def kernel_z2d(mult, x, y):
    """E(x, -iy) = product of the one-axis kernels."""
    x = as_points(mult, x)
    y = as_points(mult, y)
    out = np.ones(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]), dtype=complex)
    for i, k in enumerate(mult.kappa):
        out = out * kernel_1d(k, x[..., i], y[..., i])
    return _complex_or_array(out)


def kernel_real_1d(kappa, x, y):
    """E(x, y) for real arguments from modified Bessel functions."""
    t = np.multiply(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if kappa == 0:
        return np.exp(t)
    c = math.gamma(kappa + 0.5) * 2.0 ** (kappa - 0.5)
    at = np.abs(t)
    even = np.asarray(modified_normalized_bessel(kappa - 0.5, at))
    odd = np.asarray(modified_normalized_bessel(kappa + 0.5, at))
    return c * (even + t * odd)


def kernel_real_closed(mult, x, y):
    x = as_points(mult, x)
    y = as_points(mult, y)
    out = np.ones(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]))
    for i, k in enumerate(mult.kappa):
        out = out * kernel_real_1d(k, x[..., i], y[..., i])
    return _real_or_array(out)


def _axis_real_kernel(kappa, t, order):
    nodes, weights = intertwining_axis(kappa, order)
    return np.exp(t[..., None] * nodes) @ weights


def kernel_real_z2d(mult, x, y, order=DEFAULT_JACOBI_ORDER, tol=CONVERGENCE_TOL):
    """E(x, y) for real x, y as V_k applied to exp(<., y>) at x.

    The exponential factorizes over the axes, so the tensor quadrature of the
    intertwining integral is evaluated axis by axis; each axis doubles its rule
    order until two successive orders agree to `tol`.
    """
    x = as_points(mult, x)
    y = as_points(mult, y)
    out = np.ones(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]))
    for i, k in enumerate(mult.kappa):
        t = np.asarray(x[..., i] * y[..., i])
        if k == 0:
            out = out * np.exp(t)
            continue
        n = order
        prev = _axis_real_kernel(k, t, n)
        while n < MAX_ORDER[1]:
            n *= 2
            cur = _axis_real_kernel(k, t, n)
            if np.max(np.abs(cur - prev) / np.abs(cur), initial=0.0) <= tol:
                break
            prev = cur
        else:
            warn("Kernel", f"real kernel on axis {i} did not converge by order {n}")
        out = out * cur
    return _real_or_array(out)


def intertwining_rules(mult, order=DEFAULT_JACOBI_ORDER):
    """Per-axis (nodes, weights) of the product measure behind V_k."""
    return [intertwining_axis(k, order) for k in mult.kappa]


def _axis_rule(kappa, rule):
    if isinstance(rule, JacobiRule):
        return rule.nodes, rule.measure_weights
    if rule is None:
        return intertwining_axis(kappa)
    return rule


def _intertwine_with(f, xs, rules):
    d = xs.shape[-1]
    sizes = [nodes.size for nodes, _ in rules]
    pts = np.empty(xs.shape[:-1] + tuple(sizes) + (d,))
    for i, (nodes, _) in enumerate(rules):
        shape = [1] * d
        shape[i] = sizes[i]
        coord = xs[..., i].reshape(xs.shape[:-1] + (1,) * d) * nodes.reshape(shape)
        pts[..., i] = coord
    vals = np.asarray(f(pts))
    for _, weights in reversed(rules):
        vals = vals @ weights
    return vals


def intertwine_z2d(f, mult, x, rules=None, order=DEFAULT_JACOBI_ORDER, tol=CONVERGENCE_TOL):
    """V_k f(x) by tensor Gauss-Jacobi quadrature.

    `f` takes points of shape (..., d). Axes with kappa_i = 0 evaluate at the
    point mass u = 1. Without explicit `rules` the order doubles until two
    successive results agree to `tol`.
    """
    x = as_points(mult, x)
    if rules is not None:
        return _intertwine_with(f, x, [_axis_rule(k, r) for k, r in zip(mult.kappa, rules)])
    if mult.is_classical:
        return _intertwine_with(f, x, intertwining_rules(mult, order))

    n = order
    prev = _intertwine_with(f, x, intertwining_rules(mult, n))
    cap = MAX_ORDER.get(mult.d, 64)
    while n < cap:
        n *= 2
        cur = _intertwine_with(f, x, intertwining_rules(mult, n))
        scale = max(1.0, float(np.max(np.abs(cur), initial=0.0)))
        if np.max(np.abs(cur - prev), initial=0.0) <= tol * scale:
            debug("Kernel", f"intertwining converged at order {n}")
            return cur
        prev = cur
    warn("Kernel", f"intertwining quadrature did not converge by order {n}")
    return prev


def _unit(mult, i):
    e = np.zeros(mult.d)
    e[i] = 1.0
    return e


def dunkl_derivative_z2d(f, mult, i, x, step=None):
    """D_i f(x) = d_i f(x) + k_i (f(x) - f(sigma_i x)) / x_i, for 0-based axis i.

    Near the hyperplane x_i = 0 the difference quotient is replaced by its
    limit 2 d_i f at the projected point.
    """
    x = as_points(mult, x)
    if not 0 <= i < mult.d:
        raise DimensionMismatchError(f"axis {i} out of range for d={mult.d}")
    xi = x[..., i]
    base = FD_STEP if step is None else step
    h = (base * np.maximum(1.0, np.abs(xi)))[..., None]
    e = _unit(mult, i)
    partial = (np.asarray(f(x + h * e)) - np.asarray(f(x - h * e))) / (2.0 * h[..., 0])
    k = mult.kappa[i]
    if k == 0:
        return _real_or_array(partial)

    reflected = x.copy()
    reflected[..., i] = -xi
    near = np.abs(xi) < REFLECTION_TOL
    safe = np.where(near, 1.0, xi)
    quotient = (np.asarray(f(x)) - np.asarray(f(reflected))) / safe
    if np.any(near):
        projected = x.copy()
        projected[..., i] = 0.0
        limit = (np.asarray(f(projected + h * e)) - np.asarray(f(projected - h * e))) / h[..., 0]
        quotient = np.where(near, limit, quotient)
    return _real_or_array(partial + k * quotient)


def dunkl_laplacian_z2d(f, mult, x):
    """Sum over the axes of D_i applied twice."""
    x = as_points(mult, x)
    total = 0.0
    for i in range(mult.d):

        def inner(p, i=i):
            return dunkl_derivative_z2d(f, mult, i, p)

        total = total + np.asarray(dunkl_derivative_z2d(inner, mult, i, x, step=FD_STEP_OUTER))
    return _real_or_array(total)


def gaussian_identity_residual(mult, z, w, imaginary=False, radius=14.0, n=128):
    """Relative residual of c_h * int E(z,x) E(w,x) e^{-|x|^2/2} h^2 = e^{(nu(z)+nu(w))/2} E(z,w).

    Real z, w by default; with `imaginary` the arguments are iz and iw, so
    nu(iz) = -|z|^2 and E(iz, iw) = E(-z, w). The integrand factorizes over
    the axes, so the tensor quadrature is taken one axis at a time.
    """
    z = as_points(mult, z)
    w = as_points(mult, w)
    lhs = 1.0 + 0.0j
    for i, ((nodes, weights), k) in enumerate(zip(box_rule(mult.kappa, radius, n), mult.kappa)):
        if imaginary:
            a = np.conj(kernel_1d(k, nodes, z[i]))
            b = np.conj(kernel_1d(k, nodes, w[i]))
        else:
            a = kernel_real_1d(k, z[i], nodes)
            b = kernel_real_1d(k, w[i], nodes)
        lhs *= axis_c_h(k) * np.sum(a * b * np.exp(-(nodes**2) / 2.0) * weights)
    if imaginary:
        rhs = math.exp(-(z @ z + w @ w) / 2.0) * kernel_real_closed(mult, -z, w)
    else:
        rhs = math.exp((z @ z + w @ w) / 2.0) * kernel_real_closed(mult, z, w)
    return abs(lhs - rhs) / abs(rhs)
