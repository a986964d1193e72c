"""Special functions and the normalization constants of a multiplicity vector.

Every other module takes its constants from `Multiplicity`; nothing downstream
recomputes c_h, a_k or b_k on its own.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DimensionMismatchError, DomainError
from .log import debug, warn

# Series below, scipy's recurrence-based jv/iv above. The two agree to ~1e-12 on [8, 12].
SERIES_CROSSOVER = 10.0
SERIES_TERMS = 90

CONSTANT_TOLERANCE = 1e-10


def _scalar_or_array(out):
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def _check_order(alpha):
    if not alpha >= -0.5:
        raise DomainError(f"Bessel order must be >= -1/2, got {alpha}")


def _check_argument(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("Bessel argument must be >= 0")
    return t


def gamma_fn(x):
    """Gamma function for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    return _scalar_or_array(special.gamma(arr))


def bessel_series(alpha, t, modified=False):
    """Power series of J_a(t)/t^a (or I_a(t)/t^a when `modified`).

    The t^a factor is cancelled analytically, so the value at t = 0 is
    1 / (2^a Gamma(a+1)).
    """
    t = np.asarray(t, dtype=float)
    q = (t / 2.0) ** 2
    if not modified:
        q = -q
    term = np.full(t.shape, 1.0 / special.gamma(alpha + 1.0))
    total = term.copy()
    for n in range(1, SERIES_TERMS):
        term = term * q / (n * (n + alpha))
        total = total + term
    return total * 2.0 ** (-alpha)


def normalized_bessel(alpha, t):
    """J_a(t) / t^a, finite at t = 0."""
    _check_order(alpha)
    t = _check_argument(t)
    out = np.empty(t.shape)
    small = t <= SERIES_CROSSOVER
    out[small] = bessel_series(alpha, t[small])
    large = ~small
    if np.any(large):
        tl = t[large]
        out[large] = special.jv(alpha, tl) / tl**alpha
    return _scalar_or_array(out)


def modified_normalized_bessel(alpha, t):
    """I_a(t) / t^a, the real-argument counterpart of `normalized_bessel`."""
    _check_order(alpha)
    t = _check_argument(t)
    out = np.empty(t.shape)
    small = t <= SERIES_CROSSOVER
    out[small] = bessel_series(alpha, t[small], modified=True)
    large = ~small
    if np.any(large):
        tl = t[large]
        out[large] = special.iv(alpha, tl) / tl**alpha
    return _scalar_or_array(out)


def bessel_j(alpha, t, method="auto"):
    """Bessel function J_a(t) for a >= -1/2, t >= 0.

    method: "auto" (series below SERIES_CROSSOVER, scipy above), "series" or "stable".
    """
    _check_order(alpha)
    t = _check_argument(t)
    if method not in ("auto", "series", "stable"):
        raise ValueError(f"unknown method {method!r}")
    out = np.empty(t.shape)
    if method == "series":
        small = np.ones(t.shape, dtype=bool)
    elif method == "stable":
        small = np.zeros(t.shape, dtype=bool)
    else:
        small = t <= SERIES_CROSSOVER
    with np.errstate(divide="ignore", invalid="ignore"):
        out[small] = np.power(t[small], alpha) * bessel_series(alpha, t[small])
    out[~small] = special.jv(alpha, t[~small])
    return _scalar_or_array(out)


def jacobi_normalization(kappa):
    """b_k = Gamma(k+1/2) / (sqrt(pi) Gamma(k)); normalizes b_k (1+u)(1-u^2)^(k-1) on [-1, 1].

    Undefined at k = 0, where the measure degenerates to a point mass.
    """
    if kappa <= 0:
        raise DomainError("b_kappa is only defined for kappa > 0")
    return math.exp(math.lgamma(kappa + 0.5) - math.lgamma(kappa) - 0.5 * math.log(math.pi))


@dataclass(frozen=True, eq=False)
class Multiplicity:
    """Multiplicity vector for Z_2^d and every constant derived from it.

    a_k is the sphere normalization (a_k^-1 = integral of h_k^2 over S^{d-1}),
    d_k the unit-ball mass, so that the ball of radius r has mass d_k r^N.
    b_i holds b_{kappa_i}, or nan on axes with kappa_i = 0.
    """

    d: int
    kappa: tuple
    gamma_k: float
    lambda_k: float
    big_n: float
    c_h: float
    a_k: float
    d_k: float
    b_i: tuple

    def matches(self, other):
        return self.d == other.d and self.kappa == other.kappa

    @property
    def is_classical(self):
        return all(k == 0 for k in self.kappa)

    def weight(self, x):
        """h_k^2(x) for points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DimensionMismatchError(f"expected points of dimension {self.d}, got {x.shape[-1]}")
        out = np.ones(x.shape[:-1])
        for i, k in enumerate(self.kappa):
            if k:
                out = out * np.abs(x[..., i]) ** (2.0 * k)
        return out

    def ball_mass(self, r):
        return self.d_k * np.asarray(r, dtype=float) ** self.big_n

    def to_dict(self):
        return {
            "d": self.d,
            "kappa": list(self.kappa),
            "gamma_k": self.gamma_k,
            "lambda_k": self.lambda_k,
            "big_n": self.big_n,
            "c_h": self.c_h,
            "a_k": self.a_k,
            "d_k": self.d_k,
        }


def make_multiplicity(d, kappa, verify=True):
    """Build a Multiplicity from closed-form products of 1-D Gamma integrals."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    d = int(d)
    kappa = tuple(float(k) for k in kappa)
    if len(kappa) != d:
        raise DimensionMismatchError(f"kappa has {len(kappa)} entries for d={d}")
    for k in kappa:
        if not (math.isfinite(k) and k >= 0):
            raise DomainError(f"multiplicities must be finite and >= 0, got {k}")

    gamma_k = math.fsum(kappa)
    lambda_k = gamma_k + (d - 2) / 2.0
    big_n = d + 2.0 * gamma_k
    log_inv_c_h = math.fsum((k + 0.5) * math.log(2.0) + math.lgamma(k + 0.5) for k in kappa)
    log_sphere = math.log(2.0) + math.fsum(math.lgamma(k + 0.5) for k in kappa) - math.lgamma(gamma_k + d / 2.0)
    sphere = math.exp(log_sphere)
    mult = Multiplicity(
        d=d,
        kappa=kappa,
        gamma_k=gamma_k,
        lambda_k=lambda_k,
        big_n=big_n,
        c_h=math.exp(-log_inv_c_h),
        a_k=1.0 / sphere,
        d_k=sphere / big_n,
        b_i=tuple(jacobi_normalization(k) if k > 0 else math.nan for k in kappa),
    )
    if verify:
        residuals = verify_constants(mult)
        worst = max(residuals.values())
        if worst > CONSTANT_TOLERANCE:
            warn("Foundation", f"constant cross-check off by {worst:.2e} for kappa={kappa}")
        else:
            debug("Foundation", f"constants verified for kappa={kappa} (max residual {worst:.1e})")
    return mult


def verify_constants(mult):
    """Relative residuals of each normalization against independent quadrature."""
    opts = {"epsabs": 0.0, "epsrel": 1e-13, "limit": 200}
    inv_c_h = 1.0
    for k in mult.kappa:
        half, _ = integrate.quad(lambda t: math.exp(-t * t / 2.0), 0.0, 20.0, weight="alg", wvar=(2.0 * k, 0.0), **opts)
        inv_c_h *= 2.0 * half
    lam = mult.lambda_k
    residuals = {
        "c_h": abs(inv_c_h * mult.c_h - 1.0),
        "c_h_sphere": abs(2.0**lam * math.gamma(lam + 1.0) / mult.a_k * mult.c_h - 1.0),
    }
    unit_ball, _ = integrate.quad(lambda r: r ** (mult.big_n - 1.0), 0.0, 1.0, **opts)
    residuals["d_k"] = abs(unit_ball / mult.a_k / mult.d_k - 1.0)
    for i, k in enumerate(mult.kappa):
        if k > 0:
            total, _ = integrate.quad(lambda u: 1.0, -1.0, 1.0, weight="alg", wvar=(k - 1.0, k - 1.0), **opts)
            residuals[f"b_{i}"] = abs(total * mult.b_i[i] - 1.0)
    if mult.d == 2:
        # h^2 over the unit circle, four quadrants, u = sin^2 theta
        k1, k2 = mult.kappa
        half, _ = integrate.quad(lambda u: 1.0, 0.0, 1.0, weight="alg", wvar=(k2 - 0.5, k1 - 0.5), **opts)
        residuals["sphere_quad"] = abs(2.0 * half * mult.a_k - 1.0)
    return residuals


def sphere_mass(mult):
    """Integral of h_k^2 over the unit sphere, a_k^-1."""
    return 1.0 / mult.a_k


def axis_c_h(kappa):
    """The one-axis factor of c_h: 1 / (2^(k+1/2) Gamma(k+1/2))."""
    return math.exp(-(kappa + 0.5) * math.log(2.0) - math.lgamma(kappa + 0.5))
