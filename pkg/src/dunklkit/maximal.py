"""Maximal function M_k on grids, weak-type and majorization experiments,
and reflection symmetrization.

Ball averages use the radial translation of the ball indicator. Its jump is
replaced by a linear ramp one grid cell wide; with the ramp, every radius of a
schedule comes out of one sort of the translation arguments.
"""

import dataclasses
import itertools
from dataclasses import dataclass

import numpy as np

from .convolution import convolve
from .errors import DimensionMismatchError, DomainError, HypothesisViolationError
from .grid import RadialProfile, radial_profile
from .kernel import as_points, intertwining_rules
from .log import debug, log
from .summability import bochner_riesz_profile, dilate, poisson_kernel
from .transform import lp_norm
from .translation import radial_arguments

DEFAULT_RADII = 40
MAXIMAL_ORDER = 32
# Moment check: doublings of the outer radius, and the increment ratio that counts as decay.
MOMENT_DOUBLINGS = 12
MOMENT_DECAY = 0.9
_LEGENDRE = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True, eq=False)
class RadiusSchedule:
    """Increasing radii with the ball masses int_{B_r} h^2 = r^N / (N a_k)."""

    radii: np.ndarray
    ball_masses: np.ndarray
    cell: float = 0.0

    def __len__(self):
        return self.radii.size


def radius_schedule(mult, r_min, r_max, count=DEFAULT_RADII, cell=None):
    """`count` log-spaced radii in [r_min, r_max]; `cell` is the ramp width (defaults to r_min)."""
    if count < 1:
        raise DomainError("radius schedule must hold at least one radius")
    if not 0 < r_min <= r_max:
        raise DomainError(f"radius range must satisfy 0 < r_min <= r_max, got [{r_min}, {r_max}]")
    radii = np.geomspace(r_min, r_max, int(count))
    masses = np.array([mult.ball_mass(r) for r in radii])
    return RadiusSchedule(radii, masses, float(r_min if cell is None else cell))


def grid_schedule(f, count=DEFAULT_RADII):
    """Radii from one grid cell to twice the box radius."""
    cell = 2.0 * f.radius / f.shape[0]
    return radius_schedule(f.mult, cell, 2.0 * f.radius, count, cell)


def _soft_sums(rho, coef, radii, width):
    """sum coef * chi(rho) for each radius, chi a ramp of `width` around r."""
    order = np.argsort(rho, kind="stable")
    rho = rho[order]
    coef = coef[order]
    c_cum = np.concatenate([[0.0], np.cumsum(coef)])
    if width <= 0.0:
        return c_cum[np.searchsorted(rho, radii, side="right")]
    d_cum = np.concatenate([[0.0], np.cumsum(coef * rho)])
    lo = np.searchsorted(rho, radii - width / 2.0, side="right")
    hi = np.searchsorted(rho, radii + width / 2.0, side="right")
    ramp = ((radii + width / 2.0) * (c_cum[hi] - c_cum[lo]) - (d_cum[hi] - d_cum[lo])) / width
    return c_cum[lo] + ramp


def ball_averages(f, x, sched, order=MAXIMAL_ORDER, soften=True):
    """Signed ball averages (int f(y) tau_y chi_{B_r}(x) h^2 dy) / int_{B_r} h^2.

    Returns an array of shape x.shape[:-1] + (len(sched),). The averages are
    linear in f, and nonnegative whenever f is.
    """
    if len(sched) == 0:
        raise DomainError("empty radius schedule")
    if np.iscomplexobj(f.values):
        raise DomainError("ball averages are computed for real-valued functions")
    mult = f.mult
    x = as_points(mult, x)
    flat = x.reshape(-1, mult.d)
    rules = intertwining_rules(mult, order)
    node_w = rules[0][1]
    for _, w in rules[1:]:
        node_w = np.multiply.outer(node_w, w)
    ys = f.points()
    fw = (np.asarray(f.values) * f.quad_weights).ravel()
    coef = np.multiply.outer(fw, node_w).ravel()
    width = sched.cell if soften else 0.0
    out = np.empty((flat.shape[0], len(sched)))
    for i, xi in enumerate(flat):
        rho = radial_arguments(np.broadcast_to(xi, ys.shape), ys, rules).ravel()
        out[i] = _soft_sums(rho, coef, sched.radii, width) / sched.ball_masses
    return out.reshape(x.shape[:-1] + (len(sched),))


def maximal_function(f, x, sched, order=MAXIMAL_ORDER, soften=True):
    """M_k f(x) as the max of |ball average| over the schedule."""
    out = np.max(np.abs(ball_averages(f, x, sched, order, soften)), axis=-1)
    return out.item() if out.ndim == 0 else out


def maximal_on_grid(f, sched=None, order=MAXIMAL_ORDER, soften=True):
    """M_k f at every node of f's grid, as a GridFunction."""
    sched = grid_schedule(f) if sched is None else sched
    values = maximal_function(f, f.points(), sched, order, soften).reshape(f.shape)
    return f.with_values(values, label=f"M {f.label}".strip())


def default_levels(mf, count=9, decades=2.0):
    """Log-spaced levels spanning `decades` below max M_k f."""
    top = float(np.max(mf.values))
    if top <= 0.0:
        raise DomainError("maximal function vanishes on the grid")
    return top * np.logspace(-decades, 0.0, int(count), endpoint=False)


def weak_type_experiment(f, levels=None, sched=None, order=MAXIMAL_ORDER):
    """Rows of (a, |{M_k f > a}|_k, a |E(a)|_k / ||f||_{k,1}) with the largest ratio as `constant`."""
    mf = maximal_on_grid(f, sched, order)
    levels = default_levels(mf) if levels is None else np.asarray(levels, dtype=float)
    norm1 = lp_norm(f, 1)
    if norm1 == 0.0:
        raise DomainError("weak-type experiment on the zero function")
    weights = mf.quad_weights
    rows = []
    for a in levels:
        measure = f.mult.c_h * float(np.sum(weights[mf.values > a]))
        rows.append({"a": float(a), "levelset_mass": measure, "ratio": float(a) * measure / norm1})
    constant = max(row["ratio"] for row in rows) if rows else 0.0
    log("Maximal", f"weak-type constant {constant:.4g} over {len(rows)} levels")
    return {"rows": rows, "constant": constant}


def _derivative(f0, r):
    h = 1e-5 * np.maximum(1.0, r)
    return (np.asarray(f0(r + h)) - np.asarray(f0(np.maximum(r - h, 0.0)))) / (r + h - np.maximum(r - h, 0.0))


def _panel_integral(func, a, b, panels):
    nodes, weights = _LEGENDRE
    edges = np.linspace(a, b, int(panels) + 1)
    mid = (edges[1:] + edges[:-1]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    return float(np.sum(func(pts) * weights[None, :] * half[:, None]))


def derivative_moment(mult, f0, r0=1.0, doublings=MOMENT_DOUBLINGS):
    """int_0^inf r^{2 lam + 2} |f0'(r)| dr by dyadic shells.

    Raises HypothesisViolationError when the shell contributions stop
    decaying geometrically, the numerical sign of divergence.
    """
    p = 2.0 * mult.lambda_k + 2.0

    def integrand(r):
        return r**p * np.abs(_derivative(f0, r))

    total = _panel_integral(integrand, 0.0, r0, 32)
    shells = []
    r = r0
    for _ in range(doublings):
        shells.append(_panel_integral(integrand, r, 2.0 * r, max(8, int(np.ceil(r)))))
        r *= 2.0
    total += sum(shells)
    tail = [b / a for a, b in zip(shells[-5:-1], shells[-4:]) if a > 0.0]
    if tail and float(np.mean(tail)) > MOMENT_DECAY:
        raise HypothesisViolationError(
            f"moment int r^{p:g} |phi0'| dr does not settle: shell ratio {np.mean(tail):.3f} up to r={r:g}"
        )
    return total


def _kernel_profile(kernel):
    if isinstance(kernel, RadialProfile):
        return kernel
    if kernel.profile is not None:
        return kernel.profile
    if kernel.family == "bochner_riesz":
        mult, delta = kernel.mult, kernel.param
        return radial_profile(mult, lambda r: bochner_riesz_profile(mult, delta, r), scale=1.0, n=512, label="bochner-riesz")
    raise DomainError(f"{kernel.family} kernel is not radial")


def majorization_check(f, kernel, eps_schedule, points, sched=None, order=MAXIMAL_ORDER):
    """sup_eps |f * phi_eps(x)| / M_k f(x) at each sample point.

    `kernel` is a radial SummabilityKernel or RadialProfile; its derivative
    moment is checked first. Returns rows and the largest ratio as `constant`.
    """
    profile = _kernel_profile(kernel)
    if not f.mult.matches(profile.mult):
        raise DimensionMismatchError("kernel and function carry different multiplicities")
    moment = derivative_moment(profile.mult, profile.f0)
    sched = grid_schedule(f) if sched is None else sched
    points = np.atleast_2d(as_points(f.mult, points))
    mf = np.atleast_1d(maximal_function(f, points, sched, order))
    sup = np.zeros(points.shape[0])
    for eps in eps_schedule:
        conv = np.atleast_1d(convolve(f, dilate(profile, eps), points))
        sup = np.maximum(sup, np.abs(conv))
    rows = []
    for x, s, m in zip(points, sup, mf):
        rows.append({"x": x.tolist(), "sup_conv": float(s), "maximal": float(m), "ratio": float(s / m) if m > 0 else np.inf})
    constant = max(row["ratio"] for row in rows)
    debug("Maximal", f"majorization moment {moment:.4g}, constant {constant:.4g}")
    return {"rows": rows, "constant": constant, "moment": moment}


def poisson_maximal(f, x, eps_schedule, sched=None, order=MAXIMAL_ORDER):
    """P*f(x) = sup_eps |f * P_eps(x)| together with M_k f(x) and the ratio M_k f / P*f."""
    profile = poisson_kernel(f.mult, 1.0).profile
    sched = grid_schedule(f) if sched is None else sched
    x = np.atleast_2d(as_points(f.mult, x))
    p_star = np.zeros(x.shape[0])
    for eps in eps_schedule:
        p_star = np.maximum(p_star, np.abs(np.atleast_1d(convolve(f, dilate(profile, eps), x))))
    mf = np.atleast_1d(maximal_function(f, x, sched, order))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p_star > 0, mf / p_star, np.inf)
    return {"p_star": p_star, "maximal": mf, "ratio": ratio}


def _check_axes(f, axes):
    axes = tuple(sorted(set(int(a) for a in axes)))
    for a in axes:
        if not 0 <= a < f.d:
            raise DomainError(f"axis {a} out of range for d={f.d}")
    return axes


def reflect(f, signs):
    """f(x sigma) for a sign vector sigma, on f's (symmetric) grid."""
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (f.d,) or not np.all(np.abs(signs) == 1.0):
        raise DomainError(f"sign vector must hold {f.d} entries of +-1")
    values = np.asarray(f.values)
    for i, s in enumerate(signs):
        if s < 0:
            values = np.flip(values, axis=i)
    func = None if f.func is None else (lambda x, g=f.func: g(np.asarray(x, dtype=float) * signs))
    return f.with_values(values, func=func)


def reflection_symmetrize(f, axes):
    """2^-k times the sum of f over all sign flips of the given (0-based) axes."""
    axes = _check_axes(f, axes)
    if not axes:
        return f
    total = np.zeros(f.shape, dtype=np.asarray(f.values).dtype)
    funcs = []
    for flips in itertools.product((1.0, -1.0), repeat=len(axes)):
        signs = np.ones(f.d)
        signs[list(axes)] = flips
        moved = reflect(f, signs)
        total = total + moved.values
        funcs.append(moved.func)
    k = len(funcs)
    func = None
    if all(g is not None for g in funcs):

        def func(x):
            return sum(np.asarray(g(x)) for g in funcs) / k

    return dataclasses.replace(f, values=total / k, func=func, label=f"sym {f.label}".strip())


def refinement_shift(f, points, count=DEFAULT_RADII, order=MAXIMAL_ORDER):
    """Largest relative change in M_k f at `points` when the schedule is refined from count to 2*count radii."""
    coarse = np.atleast_1d(maximal_function(f, points, grid_schedule(f, count), order))
    fine = np.atleast_1d(maximal_function(f, points, grid_schedule(f, 2 * count), order))
    return float(np.max(np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300)))
