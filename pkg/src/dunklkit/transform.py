"""Dunkl transform by weighted quadrature, the Hankel fast path, and norm instrumentation."""

import warnings

import numpy as np

from .errors import DecayWarning, DimensionMismatchError, DomainError
from .foundation import normalized_bessel
from .grid import GridFunction, make_grid
from .kernel import as_points, kernel_1d
from .log import debug, warn
from .parallel import map_chunks

DECAY_TOL = 1e-10
_LETTERS = "abcdefgh"


def decay_check(f, tol=DECAY_TOL, emit=True):
    """Largest |f| on the outermost grid layer, relative to max |f|.

    Emits a DecayWarning when it exceeds `tol`; never raises.
    """
    values = np.abs(np.asarray(f.values))
    peak = float(values.max()) if values.size else 0.0
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for axis in range(values.ndim):
        edge = max(edge, float(np.take(values, [0, -1], axis=axis).max()))
    ratio = edge / peak
    if ratio > tol and emit:
        msg = f"{f.label or 'function'} is {ratio:.1e} of its peak at the truncation boundary R={f.radius:g}"
        warn("Transform", msg)
        warnings.warn(msg, DecayWarning, stacklevel=2)
    return ratio


def _weighted(f):
    return np.asarray(f.values) * f.quad_weights


def _axis_matrix(kappa, nodes, coords, inverse):
    m = kernel_1d(kappa, nodes[:, None], coords[None, :])
    return np.conj(m) if inverse else m


def _apply(f, targets, inverse, threads):
    mult = f.mult
    targets = as_points(mult, targets)
    single = targets.ndim == 1
    flat = targets.reshape(-1, mult.d)
    weighted = _weighted(f)
    letters = _LETTERS[: mult.d]
    expr = ",".join([letters] + [c + "z" for c in letters]) + "->z"

    def chunk(ts):
        mats = [_axis_matrix(k, f.axes[i], ts[:, i], inverse) for i, k in enumerate(mult.kappa)]
        return np.einsum(expr, weighted, *mats, optimize=True)

    out = mult.c_h * map_chunks(chunk, flat, threads=threads)
    out = out.reshape(targets.shape[:-1])
    return complex(out) if single else out


def dunkl_transform(f, targets, threads=None):
    """f^(y) = c_h sum_k f(x_k) E(x_k, -iy) w_k for each target y."""
    decay_check(f)
    return _apply(f, targets, inverse=False, threads=threads)


def inverse_dunkl_transform(fhat, targets, threads=None):
    """f(x) = c_h sum_k f^(y_k) E(ix, y_k) w_k, the conjugate kernel."""
    decay_check(fhat)
    return _apply(fhat, targets, inverse=True, threads=threads)


def transform_to_grid(f, radius=None, n=None, inverse=False):
    """Transform sampled on a full box grid, contracting one axis at a time."""
    mult = f.mult
    radius = f.radius if radius is None else radius
    n = f.shape[0] if n is None else n
    decay_check(f)
    axes, weights = make_grid(mult, radius, n)
    res = _weighted(f).astype(complex)
    for i, k in enumerate(mult.kappa):
        res = np.tensordot(res, _axis_matrix(k, f.axes[i], axes[i], inverse), axes=([0], [0]))
    label = f"{'inverse ' if inverse else ''}transform of {f.label}" if f.label else ""
    return GridFunction(mult, axes, weights, mult.c_h * res, float(radius), None, label)


def hankel_transform(p, alpha, s):
    """H_a f0(s) = integral of f0(r) J_a(rs)/(rs)^a r^(2a+1) dr.

    Under this normalization H_a is its own inverse and fixes e^{-r^2/2}.
    Orders down to -1/2 are accepted; H_{-1/2} is the cosine transform.
    """
    if not alpha >= -0.5:
        raise DomainError(f"Hankel order must be >= -1/2, got {alpha}")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise DomainError("Hankel transform targets must be >= 0")
    r = p.rule.nodes
    w = p.rule.weights
    lam = p.mult.lambda_k
    if alpha != lam:
        w = w * r ** (2.0 * (alpha - lam))
    integrand = p.values() * w
    out = np.asarray(normalized_bessel(alpha, np.multiply.outer(s, r))) @ integrand
    return float(out) if out.ndim == 0 else out


def inverse_hankel_transform(p, alpha, r):
    """Inverse of `hankel_transform`; `p` holds the transformed profile."""
    return hankel_transform(p, alpha, r)


def radial_dunkl_transform(p, targets):
    """f^(y) = H_lambda f0(|y|) for f(x) = f0(|x|)."""
    targets = as_points(p.mult, targets)
    return hankel_transform(p, p.mult.lambda_k, np.linalg.norm(targets, axis=-1))


def lp_norm(f, p, normalized=True):
    """||f||_{k,p} = (c_h sum |f|^p w)^(1/p); p = inf gives max |f|.

    With `normalized=False` the c_h factor is left out.
    """
    values = np.abs(np.asarray(f.values))
    if p == np.inf:
        return float(values.max())
    p = float(p)
    if p < 1:
        raise DomainError(f"L^p norms need p >= 1, got {p}")
    total = float(np.sum(values**p * f.quad_weights))
    if normalized:
        total *= f.mult.c_h
    return total ** (1.0 / p)


def plancherel_defect(f, radius=None, n=None):
    """| ||f^||_2 - ||f||_2 | / ||f||_2, with f^ sampled on a matching box grid."""
    norm = lp_norm(f, 2)
    if norm == 0.0:
        raise DomainError("plancherel_defect of the zero function")
    fhat = transform_to_grid(f, radius, n)
    defect = abs(lp_norm(fhat, 2) - norm) / norm
    debug("Transform", f"Plancherel defect {defect:.2e} for {f.label or 'function'}")
    return defect


def check_same_grid(f, g):
    if not f.same_grid(g):
        raise DimensionMismatchError("operands live on different grids or multiplicities")
