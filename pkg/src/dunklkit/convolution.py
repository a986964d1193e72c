"""Generalized convolution, spherical means, and the approximate-identity experiments."""

import time

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .grid import GridFunction, RadialProfile
from .kernel import as_points
from .log import debug, log
from .quadrature import sphere_rule
from .summability import summability_apply
from .transform import lp_norm
from .translation import translate_radial, translate_z2d

# Fixed per-axis translation order for convolution sums.
CONVOLUTION_ORDER = 48
DEFAULT_SCHEDULE = (1.0, 0.5, 0.25, 0.1, 0.05, 0.02)
SPHERE_POINTS = 32


def _callable(g):
    if isinstance(g, (GridFunction, RadialProfile)):
        if isinstance(g, GridFunction) and g.func is None:
            raise DomainError(f"{g.label or 'function'} has no exact callable to translate")
        return g.func if isinstance(g, GridFunction) else g
    if callable(g):
        return g
    raise DomainError(f"cannot translate {type(g).__name__}")


def _check_mult(f, g):
    gm = getattr(g, "mult", None)
    if gm is not None and not f.mult.matches(gm):
        raise DimensionMismatchError(f"multiplicities differ: {f.mult.kappa} and {gm.kappa}")


def convolve(f, g, targets, order=CONVOLUTION_ORDER):
    """(f * g)(x) = c_h sum_y f(y) tau_x g(-y) w_y over f's grid.

    A RadialProfile g goes through the radial translation formula; anything
    else must be evaluable off-grid and uses the explicit Z_2^d formula.
    """
    if not isinstance(f, GridFunction):
        raise DomainError("the first convolution operand must be a GridFunction")
    _check_mult(f, g)
    mult = f.mult
    targets = as_points(mult, targets)
    flat = targets.reshape(-1, mult.d)
    ys = f.points()
    fw = (np.asarray(f.values) * f.quad_weights).ravel()
    out = np.empty(flat.shape[0], dtype=np.result_type(fw, float))
    if isinstance(g, RadialProfile):
        for i, x in enumerate(flat):
            out[i] = fw @ np.asarray(translate_radial(mult, g, x, ys, order=order, tol=None))
    else:
        func = _callable(g)

        def reflected(p):
            return func(-p)

        for i, x in enumerate(flat):
            out[i] = fw @ np.asarray(translate_z2d(mult, reflected, x, ys, order, tol=None))
    out = mult.c_h * out.reshape(targets.shape[:-1])
    return out.item() if out.ndim == 0 else out


def convolve_on_grid(f, g, order=CONVOLUTION_ORDER):
    """f * g sampled on f's own grid."""
    values = convolve(f, g, f.points(), order).reshape(f.shape)
    return f.with_values(values, label=f"{f.label} * {getattr(g, 'label', '')}".strip(" *"))


def spherical_mean(f, r, x, n=SPHERE_POINTS, order=CONVOLUTION_ORDER):
    """S_r f(x) = a_k sum_k tau_{r y_k} f(x) w_k over the sphere rule.

    Radius 0 gives f(x). Profiles use the radial formula, other callables the
    explicit Z_2^d one.
    """
    if r < 0:
        raise DomainError(f"spherical mean radius must be >= 0, got {r}")
    mult = f.mult
    x = as_points(mult, x)
    if r == 0:
        out = np.asarray(_callable(f)(x))
        return out.item() if out.ndim == 0 else out
    points, weights = sphere_rule(mult.kappa, n)
    ys = r * points
    flat = x.reshape(-1, mult.d)
    out = np.empty(flat.shape[0])
    for i, xi in enumerate(flat):
        if isinstance(f, RadialProfile):
            moved = translate_radial(mult, f, ys, xi, order=order, tol=None)
        else:
            moved = translate_z2d(mult, _callable(f), ys, xi, order, tol=None)
        out[i] = np.real(np.asarray(moved) @ weights)
    out = mult.a_k * out.reshape(x.shape[:-1])
    return out.item() if out.ndim == 0 else out


def spherical_mean_ratio(f, r, p=2, n=SPHERE_POINTS, order=CONVOLUTION_ORDER):
    """||S_r f||_{k,p} / ||f||_{k,p} on f's grid."""
    values = spherical_mean(f, r, f.points(), n, order).reshape(f.shape)
    return lp_norm(f.with_values(values), p) / lp_norm(f, p)


def convolve_radial_polar(f, g, x, n=SPHERE_POINTS, order=CONVOLUTION_ORDER):
    """(f * g)(x) = (c_h / a_k) int S_r f(x) g0(r) r^(2 lam + 1) dr for radial g."""
    if not isinstance(g, RadialProfile):
        raise DomainError("polar convolution needs a radial profile")
    _check_mult(f, g)
    mult = f.mult
    x = as_points(mult, x)
    rule = g.rule
    means = np.stack([np.asarray(spherical_mean(f, float(r), x, n, order)) for r in rule.nodes], axis=-1)
    out = (mult.c_h / mult.a_k) * (means @ (np.asarray(g.f0(rule.nodes)) * rule.weights))
    return out.item() if np.ndim(out) == 0 else out


def convergence_experiment(f, kernel, p=2, schedule=DEFAULT_SCHEDULE, freq_radius=None, freq_n=None):
    """||T_eps f - f||_{k,p} along a decreasing schedule of eps.

    Returns one row per eps with the absolute and relative error and the
    wall time in milliseconds.
    """
    if not f.mult.matches(kernel.mult):
        raise DimensionMismatchError("kernel and function carry different multiplicities")
    base = lp_norm(f, p)
    if base == 0.0:
        raise DomainError("convergence experiment on the zero function")
    rows = []
    for eps in schedule:
        start = time.perf_counter()
        approx = summability_apply(f, kernel, eps, freq_radius, freq_n)
        err = lp_norm(approx.with_values(approx.values - f.values), p)
        elapsed = 1000.0 * (time.perf_counter() - start)
        rows.append(
            {
                "kernel": kernel.family,
                "param": kernel.param,
                "eps": float(eps),
                "p": float(p),
                "error": err,
                "relative": err / base,
                "runtime_ms": elapsed,
            }
        )
        debug("Convolve", f"{kernel.family} eps={eps:g} p={p:g} rel={err / base:.3e}")
    log("Convolve", f"{kernel.family}: relative error {rows[-1]['relative']:.2e} at eps={rows[-1]['eps']:g}")
    return rows


def young_ratio(f, g, p, order=CONVOLUTION_ORDER):
    """||f * g||_p / (||g||_1 ||f||_p), at most 1 for radial g >= 0."""
    conv = convolve_on_grid(f, g, order)
    g1 = g.mass() if isinstance(g, RadialProfile) else lp_norm(g, 1)
    return lp_norm(conv, p) / (abs(g1) * lp_norm(f, p))


def general_young_ratio(f, g, q, r, order=CONVOLUTION_ORDER):
    """||f * g||_p / (||f||_q ||g||_r) with 1/p = 1/q + 1/r - 1."""
    inv = 1.0 / q + 1.0 / r - 1.0
    if not 0.0 <= inv <= 1.0:
        raise DomainError(f"exponents q={q}, r={r} give no admissible p")
    p = np.inf if inv == 0.0 else 1.0 / inv
    if not isinstance(g, GridFunction):
        raise DomainError("general Young ratio needs g sampled on a grid")
    conv = convolve_on_grid(f, g, order)
    return lp_norm(conv, p) / (lp_norm(f, q) * lp_norm(g, r))
