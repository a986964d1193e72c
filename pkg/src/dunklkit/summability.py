"""Summability kernels, dilations and the T_eps operator.

Each kernel pairs a space-side phi with the multiplier Phi for which phi is
the transform of Phi. T_eps f has transform f^(xi) Phi(-eps xi), which is the
transform of f * phi_eps.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError
from .foundation import normalized_bessel
from .grid import GridFunction, RadialProfile, radial_profile, sample
from .kernel import as_points, kernel_real_z2d
from .log import debug
from .quadrature import box_rule
from .transform import hankel_transform, transform_to_grid

HEAT = "heat"
POISSON = "poisson"
BOCHNER_RIESZ = "bochner_riesz"
SKEWED = "skewed"
FAMILIES = (HEAT, POISSON, BOCHNER_RIESZ, SKEWED)


@dataclass(frozen=True, eq=False)
class SummabilityKernel:
    """phi at eps = 1 with its multiplier; `eps` is the dilation named by `param`.

    `profile` is set for radial kernels. `integrable` is False for
    Bochner-Riesz at or below the critical index (N-1)/2.
    """

    family: str
    param: float
    mult: object
    multiplier: object
    phi: object
    profile: RadialProfile = None
    eps: float = 1.0
    integrable: bool = True

    def phi_eps(self, eps=None):
        """x -> eps^-N phi(x / eps)."""
        eps = self.eps if eps is None else eps
        return _dilated_callable(self.phi, self.mult, eps)

    def multiplier_at(self, xi, eps=None):
        """Phi(-eps xi), the factor applied to f^."""
        eps = self.eps if eps is None else eps
        return self.multiplier(-eps * np.asarray(xi, dtype=float))


def _check_eps(eps):
    if not eps > 0:
        raise DomainError(f"dilation parameter must be positive, got {eps}")


def _dilated_callable(func, mult, eps):
    _check_eps(eps)
    scale = eps ** (-mult.big_n)
    return lambda x: scale * np.asarray(func(np.asarray(x, dtype=float) / eps))


def dilate(p, eps):
    """phi_eps(x) = eps^-N phi(x / eps), mass-preserving.

    RadialProfile: the radial rule is rescaled with it, so the weighted
    integral is unchanged up to rounding. GridFunction: resampled on the same
    grid from its callable. Plain callables are wrapped.
    """
    _check_eps(eps)
    if isinstance(p, RadialProfile):
        mult = p.mult
        scale = eps ** (-mult.big_n)
        rule = type(p.rule)(
            nodes=p.rule.nodes * eps,
            weights=p.rule.weights * eps ** (2.0 * mult.lambda_k + 2.0),
            kind=p.rule.kind,
            extent=p.rule.extent * eps,
        )
        support = None if p.support is None else p.support * eps
        return RadialProfile(lambda r, f0=p.f0: scale * np.asarray(f0(np.asarray(r) / eps)), mult, rule, p.label, support)
    if isinstance(p, GridFunction):
        if p.func is None:
            raise DomainError("dilating a GridFunction needs its exact callable")
        func = _dilated_callable(p.func, p.mult, eps)
        mesh = np.stack(np.meshgrid(*p.axes, indexing="ij"), axis=-1)
        return p.with_values(np.asarray(func(mesh)), func=func)
    raise DomainError(f"cannot dilate {type(p).__name__}")


def _sq_norm(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def heat_kernel(mult, t):
    """q_t = (2t)^{-N/2} e^{-|x|^2/4t}, the dilation of e^{-|x|^2/2} at eps = sqrt(2t)."""
    if not t > 0:
        raise DomainError(f"heat time must be positive, got {t}")
    profile = radial_profile(mult, lambda r: np.exp(-np.asarray(r) ** 2 / 2.0), label="gaussian")
    return SummabilityKernel(
        family=HEAT,
        param=float(t),
        mult=mult,
        multiplier=lambda xi: np.exp(-_sq_norm(xi) / 2.0),
        phi=lambda x: np.exp(-_sq_norm(x) / 2.0),
        profile=profile,
        eps=math.sqrt(2.0 * t),
    )


def poisson_constant(mult):
    """c_{d,k} = 2^{gamma + d/2} Gamma(gamma + (d+1)/2) / sqrt(pi)."""
    g = mult.gamma_k
    d = mult.d
    return math.exp((g + d / 2.0) * math.log(2.0) + math.lgamma(g + (d + 1) / 2.0) - 0.5 * math.log(math.pi))


def poisson_kernel(mult, eps):
    """P_eps(x) = c eps / (eps^2 + |x|^2)^{(N+1)/2}, multiplier e^{-eps |xi|}."""
    _check_eps(eps)
    c = poisson_constant(mult)
    power = (mult.big_n + 1.0) / 2.0

    def f0(r):
        return c / (1.0 + np.asarray(r, dtype=float) ** 2) ** power

    return SummabilityKernel(
        family=POISSON,
        param=float(eps),
        mult=mult,
        multiplier=lambda xi: np.exp(-np.sqrt(_sq_norm(xi))),
        phi=lambda x: c / (1.0 + _sq_norm(x)) ** power,
        profile=radial_profile(mult, f0, scale=1.0, n=512, label="poisson"),
        eps=float(eps),
    )


def bochner_riesz_profile(mult, delta, r):
    """Space-side profile of (1 - |xi|^2)_+^delta: 2^delta Gamma(delta+1) J_{lam+delta+1}(r) / r^{lam+delta+1}."""
    lam = mult.lambda_k
    c = 2.0**delta * math.gamma(delta + 1.0)
    return c * np.asarray(normalized_bessel(lam + delta + 1.0, np.abs(np.asarray(r, dtype=float))))


def bochner_riesz_display(mult, delta, r):
    """The printed form 2^lam |x|^{-lam-delta-1} J_{lam+delta+1}(|x|), without its Gamma bookkeeping."""
    lam = mult.lambda_k
    return 2.0**lam * np.asarray(normalized_bessel(lam + delta + 1.0, np.abs(np.asarray(r, dtype=float))))


def bochner_riesz_hankel(mult, delta, r, n=256):
    """Profile by direct Hankel transform of (1 - s^2)^delta on [0, 1]."""
    if delta < 0:
        raise DomainError(f"Bochner-Riesz index must be >= 0, got {delta}")
    p = radial_profile(
        mult,
        lambda s: np.maximum(1.0 - np.asarray(s, dtype=float) ** 2, 0.0) ** delta,
        support=1.0,
        endpoint_power=delta,
        n=n,
        label="bochner-riesz multiplier",
    )
    return hankel_transform(p, mult.lambda_k, np.abs(np.asarray(r, dtype=float)))


def bochner_riesz_constant(mult, delta):
    """Ratio of the Hankel-route profile to the printed display, 2^{delta - lam} Gamma(delta + 1)."""
    return 2.0 ** (delta - mult.lambda_k) * math.gamma(delta + 1.0)


def critical_index(mult):
    return (mult.big_n - 1.0) / 2.0


def bochner_riesz_kernel(mult, delta, R=1.0):
    """S_R^delta as T_eps with eps = 1/R and multiplier (1 - |xi|^2)_+^delta."""
    if delta < 0:
        raise DomainError(f"Bochner-Riesz index must be >= 0, got {delta}")
    if not R > 0:
        raise DomainError(f"Bochner-Riesz radius must be positive, got {R}")

    def multiplier(xi):
        base = np.maximum(1.0 - _sq_norm(xi), 0.0)
        return base**delta if delta > 0 else (base > 0).astype(float)

    return SummabilityKernel(
        family=BOCHNER_RIESZ,
        param=float(delta),
        mult=mult,
        multiplier=multiplier,
        phi=lambda x: bochner_riesz_profile(mult, delta, np.sqrt(_sq_norm(x))),
        profile=None,
        eps=1.0 / R,
        integrable=delta > critical_index(mult),
    )


def skewed_kernel(mult):
    """Non-radial phi(x) = e^{-|x|^2/2} (1 + x_1) with c_h int phi h^2 = 1.

    Its transform is e^{-|xi|^2/2} (1 - i xi_1), so Phi(xi) = e^{-|xi|^2/2} (1 + i xi_1).
    """

    def phi(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-_sq_norm(x) / 2.0) * (1.0 + x[..., 0])

    def multiplier(xi):
        xi = np.asarray(xi, dtype=float)
        return np.exp(-_sq_norm(xi) / 2.0) * (1.0 + 1j * xi[..., 0])

    return SummabilityKernel(family=SKEWED, param=1.0, mult=mult, multiplier=multiplier, phi=phi)


def make_kernel(mult, family, param, R=1.0):
    if family == HEAT:
        return heat_kernel(mult, param)
    if family == POISSON:
        return poisson_kernel(mult, param)
    if family == BOCHNER_RIESZ:
        return bochner_riesz_kernel(mult, param, R)
    if family == SKEWED:
        return skewed_kernel(mult)
    raise DomainError(f"unknown kernel family {family!r}; expected one of {', '.join(FAMILIES)}")


def kernel_mass(k, eps=None, radius=12.0, n=96):
    """c_h int phi_eps h^2: polar quadrature for radial kernels, the box grid otherwise."""
    eps = k.eps if eps is None else eps
    if k.profile is not None:
        return dilate(k.profile, eps).mass()
    g = sample(k.mult, k.phi_eps(eps), radius, n)
    return k.mult.c_h * float(np.sum(np.asarray(g.values).real * g.quad_weights))


def summability_apply(f, k, eps=None, freq_radius=None, freq_n=None):
    """T_eps f on f's grid: inverse transform of f^(xi) Phi(-eps xi)."""
    eps = k.eps if eps is None else eps
    _check_eps(eps)
    fhat = transform_to_grid(f, freq_radius, freq_n)
    damped = fhat.with_values(fhat.values * k.multiplier_at(fhat.points(), eps).reshape(fhat.shape))
    back = transform_to_grid(damped, f.radius, f.shape[0], inverse=True)
    values = back.values.real if np.isrealobj(f.values) else back.values
    debug("Summability", f"{k.family} T_eps at eps={eps:g}")
    return f.with_values(values, label=f"T_eps {f.label}")


def poisson_subordination(mult, eps, x):
    """P_eps(x) as int_0^inf q_s(x) eps/(2 sqrt(pi)) s^{-3/2} e^{-eps^2/4s} ds, by adaptive quadrature."""
    _check_eps(eps)
    x = as_points(mult, x)
    half_n = mult.big_n / 2.0
    coef = eps / (2.0 * math.sqrt(math.pi))

    def density(s, r2):
        return (2.0 * s) ** -half_n * math.exp(-(r2 + eps * eps) / (4.0 * s)) * coef * s**-1.5

    r2s = np.atleast_1d(_sq_norm(x)).ravel()
    out = np.empty(r2s.shape)
    for i, r2 in enumerate(r2s):
        a = (r2 + eps * eps) / 4.0
        # The density peaks near s = a / b with b = (N+1)/2; split there.
        peak = a / ((mult.big_n + 1.0) / 2.0)
        left, _ = integrate.quad(density, 0.0, peak, args=(r2,), epsabs=0.0, epsrel=1e-12, limit=200)
        right, _ = integrate.quad(density, peak, np.inf, args=(r2,), epsabs=0.0, epsrel=1e-12, limit=200)
        out[i] = left + right
    out = out.reshape(x.shape[:-1])
    return out.item() if out.ndim == 0 else out


def heat_semigroup_residual(mult, s, t, x, radius=12.0, n=64):
    """max |q_s * q_t - q_{s+t}| / max q_{s+t} at the points x.

    Uses (q_s * q_t)(x) = c_h int q_t(y) tau_y q_s(x) h^2 dy with the closed
    form of the translated Gaussian.
    """
    if not (s > 0 and t > 0):
        raise DomainError("heat times must be positive")
    x = np.atleast_2d(as_points(mult, x))
    n_half = mult.big_n / 2.0
    rules = box_rule(mult.kappa, radius, n)
    mesh = np.stack(np.meshgrid(*[r[0] for r in rules], indexing="ij"), axis=-1).reshape(-1, mult.d)
    w = rules[0][1]
    for r in rules[1:]:
        w = np.multiply.outer(w, r[1])
    w = w.ravel()
    q_t = (2.0 * t) ** -n_half * np.exp(-_sq_norm(mesh) / (4.0 * t))
    a = 1.0 / (4.0 * s)
    conv = np.empty(x.shape[0])
    for i, xi in enumerate(x):
        damping = np.exp(-a * (xi @ xi + _sq_norm(mesh)))
        moved = (2.0 * s) ** -n_half * damping * kernel_real_z2d(mult, 2.0 * a * xi, mesh)
        conv[i] = mult.c_h * np.sum(q_t * moved * w)
    exact = (2.0 * (s + t)) ** -n_half * np.exp(-_sq_norm(x) / (4.0 * (s + t)))
    return float(np.max(np.abs(conv - exact)) / np.max(exact))
