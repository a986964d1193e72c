"""Generalized translation tau_y by the explicit Z_2^d formula, the radial formula,
the spectral definition and closed forms.

Convention: tau_y f(x) reduces to f(x - y) when kappa = 0.
"""

import math
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatchError, DomainError
from .grid import GridFunction
from .kernel import CONVERGENCE_TOL, as_points, intertwining_rules, kernel_real_z2d, kernel_z2d
from .log import debug, warn
from .parallel import map_chunks
from .quadrature import DEFAULT_JACOBI_ORDER, JacobiRule, intertwining_axis
from .transform import decay_check, inverse_dunkl_transform, lp_norm, transform_to_grid

DEFAULT_TRANSLATION_ORDER = 64
# Largest order the refinement loop doubles to, per dimension.
TRANSLATION_MAX_ORDER = {1: 1024, 2: 128, 3: 32}
# Radicands below this fraction of t^2 + s^2 take the analytic limit of the ratio.
RADICAND_EPS = np.finfo(float).eps
# Stencil points evaluated per work chunk.
STENCIL_BUDGET = 1 << 20


def translation_stencil(kappa, s, t, order=DEFAULT_TRANSLATION_ORDER, rule=None):
    """Nodes and weights with tau_s f(t) = sum_k w_k f(z_k) on one axis.

    For each Jacobi node u the integrand contributes f(+rho) and f(-rho),
    rho = sqrt(t^2 + s^2 - 2 s t u), with weights (1 +- (t - s)/rho) / 2 times
    the measure weight. kappa = 0 collapses to the point mass at u = 1.
    Broadcasts over s and t; the trailing axis indexes the stencil.
    """
    if isinstance(rule, JacobiRule):
        u, mw = rule.nodes, rule.measure_weights
    else:
        u, mw = intertwining_axis(kappa, order)
    s = np.asarray(s, dtype=float)[..., None]
    t = np.asarray(t, dtype=float)[..., None]
    radicand = t * t + s * s - 2.0 * s * t * u
    rho = np.sqrt(np.maximum(radicand, 0.0))
    small = radicand <= RADICAND_EPS * (t * t + s * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(small, np.sign(t - s), (t - s) / np.where(small, 1.0, rho))
    nodes = np.concatenate(np.broadcast_arrays(rho, -rho), axis=-1)
    weights = np.concatenate([0.5 * mw * (1.0 + ratio), 0.5 * mw * (1.0 - ratio)], axis=-1)
    return nodes, weights


def _refine(evaluate, order, tol, d, what):
    """evaluate(order), doubled until two successive orders agree to `tol`.

    tol=None keeps the starting order. The loop stops at
    TRANSLATION_MAX_ORDER[d] and warns if it got there without agreeing.
    """
    prev = np.asarray(evaluate(order))
    cap = TRANSLATION_MAX_ORDER.get(d, 32)
    if tol is None or 2 * order > cap:
        return prev
    n = order
    while 2 * n <= cap:
        n *= 2
        cur = np.asarray(evaluate(n))
        scale = max(1.0, float(np.max(np.abs(cur), initial=0.0)))
        if float(np.max(np.abs(cur - prev), initial=0.0)) <= tol * scale:
            debug("Translate", f"{what} converged at order {n}")
            return cur
        prev = cur
    warn("Translate", f"{what} did not converge by order {n}")
    return prev


def translate_1d(kappa, f, s, t, rule=None, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """tau_s f(t) on the real line for the weight |x|^(2 kappa).

    A fixed `rule` is used as given; otherwise the order starts at `order`
    and doubles until converged.
    """

    def evaluate(n):
        nodes, weights = translation_stencil(kappa, s, t, n, rule)
        return np.sum(np.asarray(f(nodes)) * weights, axis=-1)

    if rule is not None or kappa == 0:
        out = evaluate(order)
    else:
        out = _refine(evaluate, order, tol, 1, "1-d translation")
    return out.item() if out.ndim == 0 else out


def _block_size(sizes):
    return max(1, STENCIL_BUDGET // int(np.prod(sizes)))


def _pairs(mult, x, y):
    x = as_points(mult, x)
    y = as_points(mult, y)
    xb, yb = np.broadcast_arrays(x, y)
    batch = xb.shape[:-1]
    d = mult.d
    return batch, np.concatenate([xb.reshape(-1, d), yb.reshape(-1, d)], axis=1)


def _translate_block(mult, f, pairs, order):
    d = mult.d
    x, y = pairs[:, :d], pairs[:, d:]
    stencils = [translation_stencil(k, y[:, i], x[:, i], order) for i, k in enumerate(mult.kappa)]
    sizes = [nodes.shape[-1] for nodes, _ in stencils]
    b = pairs.shape[0]
    pts = np.empty((b,) + tuple(sizes) + (d,))
    for i, (nodes, _) in enumerate(stencils):
        shape = [b] + [1] * d
        shape[1 + i] = sizes[i]
        pts[..., i] = nodes.reshape(shape)
    vals = np.asarray(f(pts))
    for i in reversed(range(d)):
        vals = np.sum(vals * stencils[i][1].reshape((b,) + (1,) * i + (sizes[i],)), axis=-1)
    return vals


def translate_z2d(mult, f, y, x, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """tau_y f(x) as the composition of the one-axis translations.

    `f` takes points of shape (..., d); x and y broadcast against each other.
    The per-axis order starts at `order` and doubles until two successive
    orders agree to `tol`; tol=None keeps it fixed.
    """
    batch, pairs = _pairs(mult, x, y)

    def evaluate(n):
        sizes = [2 * (1 if k == 0 else n) for k in mult.kappa]
        return map_chunks(lambda c: _translate_block(mult, f, c, n), pairs, chunk=_block_size(sizes))

    if all(k == 0 for k in mult.kappa):
        out = evaluate(order)
    else:
        out = _refine(evaluate, order, tol, mult.d, "Z_2^d translation")
    out = out.reshape(batch)
    return out.item() if out.ndim == 0 else out


def radial_arguments(x, y, rules):
    """sqrt(|x|^2 + |y|^2 - 2 sum x_i y_i t_i) over the tensor nodes t.

    x and y are (b, d); the result is (b, m_1, ..., m_d).
    """
    b, d = x.shape
    sizes = [nodes.size for nodes, _ in rules]
    inner = np.zeros((b,) + tuple(sizes))
    for i, (nodes, _) in enumerate(rules):
        shape = [1] * (d + 1)
        shape[1 + i] = sizes[i]
        inner = inner + (x[:, i] * y[:, i]).reshape((b,) + (1,) * d) * nodes.reshape(shape)
    base = (np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)).reshape((b,) + (1,) * d)
    return np.sqrt(np.maximum(base - 2.0 * inner, 0.0))


def _radial_block(mult, p, pairs, rules):
    d = mult.d
    vals = np.asarray(p.f0(radial_arguments(pairs[:, :d], pairs[:, d:], rules)))
    for _, weights in reversed(rules):
        vals = vals @ weights
    return vals


def translate_radial(mult, p, y, x, order=DEFAULT_JACOBI_ORDER, rules=None, tol=CONVERGENCE_TOL):
    """tau_y f(x) for f(x) = f0(|x|), as V_k in the variable y of
    f0(sqrt(|x|^2 + |y|^2 - 2 <x, y t>)).

    The radicand never needs x' or y' on its own, so x = 0 and y = 0 fall out
    as f0(|y|) and f0(|x|). Without fixed `rules` the order doubles from
    `order` until converged.
    """
    batch, pairs = _pairs(mult, x, y)

    def evaluate(n, fixed=None):
        rs = fixed if fixed is not None else intertwining_rules(mult, n)
        sizes = [nodes.size for nodes, _ in rs]
        return map_chunks(lambda c: _radial_block(mult, p, c, rs), pairs, chunk=_block_size(sizes))

    if rules is not None:
        out = evaluate(order, rules)
    else:
        out = _refine(evaluate, order, tol, mult.d, "radial translation")
    out = out.reshape(batch)
    return out.item() if out.ndim == 0 else out


def translate_spectral(f, y, targets, fhat=None, radius=None, n=None):
    """tau_y f at `targets` as c_h * int E(ix, xi) E(-iy, xi) f^(xi) h^2 d(xi)."""
    mult = f.mult
    y = as_points(mult, y)
    if fhat is None:
        fhat = transform_to_grid(f, radius, n)
    decay_check(fhat, tol=1e-8)
    shifted = fhat.values * kernel_z2d(mult, fhat.points(), y).reshape(fhat.shape)
    return inverse_dunkl_transform(fhat.with_values(shifted), targets)


def translate_heat_closed(mult, t, x, y):
    """tau_y e^{-t|.|^2}(x) = e^{-t(|x|^2 + |y|^2)} E(2tx, y)."""
    if not t > 0:
        raise DomainError(f"heat parameter must be positive, got {t}")
    x = as_points(mult, x)
    y = as_points(mult, y)
    damping = np.exp(-t * (np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)))
    return damping * np.asarray(kernel_real_z2d(mult, 2.0 * t * x, y))


def _fraction(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def translate_monomial_sd(d, kappa, x, y, j, k=None):
    """tau_y of x_j (k=None) or x_j x_k for the symmetric group S_d, exactly.

    Uses V_k x_i = (x_i + kappa (x_1 + ... + x_d)) / (d kappa + 1); for the
    transposition root e_a - e_b the correction is
    kappa v_j v_k (x_a - x_b)(y_a - y_b) / (d kappa + 1). Axes are 0-based.
    """
    if d < 1:
        raise DomainError(f"dimension must be positive, got {d}")
    kappa = _fraction(kappa)
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    x = [_fraction(v) for v in x]
    y = [_fraction(v) for v in y]
    if len(x) != d or len(y) != d:
        raise DimensionMismatchError(f"points must have {d} coordinates")
    for axis in (j,) if k is None else (j, k):
        if not 0 <= axis < d:
            raise DomainError(f"axis {axis} out of range for d={d}")
    if k is None:
        return x[j] - y[j]
    value = (x[j] - y[j]) * (x[k] - y[k])
    scale = kappa / (d * kappa + 1)
    correction = Fraction(0)
    for a in range(d):
        for b in range(a + 1, d):
            vj = (a == j) - (b == j)
            vk = (a == k) - (b == k)
            if vj and vk:
                correction += vj * vk * (x[a] - x[b]) * (y[a] - y[b])
    return value + scale * correction


def translation_continuity(f, ys, p=2, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """||tau_y f - f||_{k,p} on f's grid for each y in `ys`."""
    if f.func is None:
        raise DomainError("translation_continuity needs a GridFunction with an exact callable")
    pts = f.points()
    out = []
    for y in ys:
        moved = translate_z2d(f.mult, f.func, np.asarray(y, dtype=float), pts, order, tol).reshape(f.shape)
        out.append(lp_norm(f.with_values(moved - f.values), p))
    debug("Translate", f"continuity norms {['%.2e' % v for v in out]}")
    return np.asarray(out)


def continuity_rate(f, ys, p=2, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL, small=1e-3):
    """Fit ||tau_y f - f||_{k,p} <= C |y| over a shrinking sequence `ys`.

    Returns the norms, the smallest C that bounds every point, the slope of
    log norm against log |y| (1 for a Lipschitz rate) and whether the last
    norm is below `small`.
    """
    ys = [np.atleast_1d(np.asarray(y, dtype=float)) for y in ys]
    if len(ys) < 2:
        raise DomainError("continuity_rate needs at least two shifts")
    sizes = np.array([np.linalg.norm(y) for y in ys])
    if np.any(sizes <= 0):
        raise DomainError("continuity_rate needs nonzero shifts")
    norms = translation_continuity(f, ys, p, order, tol)
    constant = float(np.max(norms / sizes))
    positive = norms > 0
    if np.count_nonzero(positive) >= 2:
        slope = float(np.polyfit(np.log(sizes[positive]), np.log(norms[positive]), 1)[0])
    else:
        slope = math.nan
    result = {
        "shifts": sizes,
        "norms": norms,
        "constant": constant,
        "slope": slope,
        "below": bool(norms[-1] < small),
    }
    debug("Translate", f"continuity C={constant:.3e} slope={slope:.3f}")
    return result


def translation_duality_residual(f, g, y, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """|int tau_y f g h^2 - int f tau_{-y} g h^2| relative to the larger term."""
    if f.func is None or g.func is None:
        raise DomainError("duality needs exact callables for both functions")
    mult = f.mult
    pts = f.points()
    y = as_points(mult, y)
    w = f.quad_weights.ravel()
    lhs = np.sum(translate_z2d(mult, f.func, y, pts, order, tol) * np.asarray(g.func(pts)) * w)
    rhs = np.sum(np.asarray(f.func(pts)) * translate_z2d(mult, g.func, -y, pts, order, tol) * w)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def translation_norm_ratio(f, y, p=2, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """||tau_y f||_{k,p} / ||f||_{k,p} on f's grid."""
    if f.func is None:
        raise DomainError("translation_norm_ratio needs a GridFunction with an exact callable")
    moved = translate_z2d(f.mult, f.func, np.asarray(y, dtype=float), f.points(), order, tol).reshape(f.shape)
    return lp_norm(f.with_values(moved), p) / lp_norm(f, p)


def translated_grid(f, y, order=DEFAULT_TRANSLATION_ORDER, tol=CONVERGENCE_TOL):
    """tau_y f sampled on f's own grid."""
    if not isinstance(f, GridFunction) or f.func is None:
        raise DomainError("translated_grid needs a GridFunction with an exact callable")
    y = np.asarray(y, dtype=float)
    moved = translate_z2d(f.mult, f.func, y, f.points(), order, tol).reshape(f.shape)
    return f.with_values(moved, label=f"tau_y {f.label}")
