"""Acceptance checks run by `dunklkit verify`.

Each check measures one identity on a fixed, small problem and reports the
measured defect against its tolerance. Multiplicities and grids are fixed
here so that results are comparable between configs; only the random seed
comes from the config.
"""

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .convolution import convergence_experiment, convolve_on_grid, young_ratio
from .errors import DunklError
from .foundation import make_multiplicity, normalized_bessel, verify_constants
from .grid import make_grid, radial_profile, sample
from .kernel import dunkl_laplacian_z2d, gaussian_identity_residual, intertwine_z2d, kernel_z2d
from .log import debug, log
from .maximal import (
    ball_averages,
    grid_schedule,
    majorization_check,
    maximal_function,
    weak_type_experiment,
)
from .summability import (
    bochner_riesz_kernel,
    critical_index,
    dilate,
    heat_kernel,
    heat_semigroup_residual,
    poisson_constant,
    poisson_kernel,
    poisson_subordination,
    skewed_kernel,
)
from .testfunctions import SUITE, SUITE_FUNCTIONS, bump, bump_profile, dirac_like
from .transform import (
    dunkl_transform,
    inverse_dunkl_transform,
    lp_norm,
    plancherel_defect,
    radial_dunkl_transform,
    transform_to_grid,
)
from .translation import (
    translate_heat_closed,
    translate_monomial_sd,
    translate_radial,
    translate_spectral,
    translate_z2d,
    translated_grid,
)

KERNEL_KAPPAS = {1: [(0.0,), (0.5,), (1.0,), (2.5,)], 2: [(0.0, 0.5), (0.5, 1.0), (1.0, 2.5), (2.5, 2.5)]}
SMALL = {1: (0.5,), 2: (0.5, 1.0)}
# kappa = 0 on the first axis: the translation rule collapses to a point mass there.
ATOMIC_AXIS = (0.0, 0.5)
P_VALUES = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    measured: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
            "runtime_ms": self.runtime_ms,
        }


CHECKS = {}


def check(name, anchor, tolerance):
    """Register a check. The function returns the measured defect, or (defect, detail[, passed])."""

    def register(fn):
        CHECKS[name] = (anchor, tolerance, fn)
        return fn

    return register


def _mult(kappa):
    return make_multiplicity(len(kappa), kappa, verify=False)


def _sq(x):
    return np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)


def _ball_points(rng, count, d, radius):
    """Uniform points in the ball of the given radius."""
    v = rng.normal(size=(count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * radius * rng.uniform(size=(count, 1)) ** (1.0 / d)


@check("multiplicity_constants", "foundation.make_multiplicity", 1e-10)
def _constants(rng):
    worst = {}
    for d, kappas in KERNEL_KAPPAS.items():
        for kappa in kappas:
            worst[str(kappa)] = max(verify_constants(_mult(kappa)).values())
    return max(worst.values()), {"residuals": worst}


@check("kernel_two_path", "kernel.kernel_z2d", 1e-8)
def _kernel_two_path(rng):
    errors = {}
    for d, kappas in KERNEL_KAPPAS.items():
        for kappa in kappas:
            mult = _mult(kappa)
            xs = _ball_points(rng, 25, d, 5.0)
            ys = _ball_points(rng, 25, d, 5.0)
            err = 0.0
            for x, y in zip(xs, ys):
                direct = kernel_z2d(mult, x, y)
                quad = intertwine_z2d(lambda p, y=y: np.exp(-1j * (p @ y)), mult, x)
                err = max(err, abs(direct - complex(quad)))
            errors[str(kappa)] = err
    # |E(x, -iy)| <= 1, so the absolute error is also relative to the kernel's scale.
    return max(errors.values()), {"max_abs_error": errors}


@check("gaussian_fixed_point", "transform.dunkl_transform", 1e-7)
def _gaussian_fixed_point(rng):
    errors = {}
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        f = sample(mult, lambda x: np.exp(-_sq(x) / 2.0), label="gaussian")
        targets = rng.uniform(-4.0, 4.0, size=(20, d))
        got = dunkl_transform(f, targets)
        want = np.exp(-_sq(targets) / 2.0)
        errors[str(kappa)] = float(np.max(np.abs(got - want)) / np.max(want))
    return max(errors.values()), {"relative_error": errors}


@check("gaussian_identity", "kernel.gaussian_identity_residual", 1e-8)
def _gaussian_identity(rng):
    worst = 0.0
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        for _ in range(3):
            z, w = rng.uniform(-1.5, 1.5, size=(2, d))
            worst = max(worst, gaussian_identity_residual(mult, z, w), gaussian_identity_residual(mult, z, w, imaginary=True))
    return worst


@check("plancherel_suite", "transform.plancherel_defect", 1e-6)
def _plancherel(rng):
    defects = {}
    by_kappa = {}
    for kappa in (SMALL[1], (0.0,), (1.5,), SMALL[2], ATOMIC_AXIS):
        mult = _mult(kappa)
        n = 96 if mult.d == 1 else 64
        current = {f"{name}/{kappa}": plancherel_defect(sample(mult, SUITE_FUNCTIONS[name], n=n, label=name)) for name in SUITE}
        defects.update(current)
        by_kappa[str(kappa)] = max(current.values())
    return max(defects.values()), {"worst": max(defects, key=defects.get), "by_kappa": by_kappa}


@check("poisson_transform_pair", "summability.poisson_kernel", 1e-5)
def _poisson_pair(rng):
    errors = {}
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        p = radial_profile(mult, lambda r: np.exp(-np.asarray(r)), n=384, label="exp(-r)")
        s = np.linspace(0.0, 5.0, 11)
        got = radial_dunkl_transform(p, s[:, None] * np.eye(d)[0])
        want = poisson_constant(mult) * (1.0 + s**2) ** -(mult.gamma_k + (d + 1) / 2.0)
        errors[str(kappa)] = float(np.max(np.abs(got - want) / want))
    return max(errors.values()), {"relative_error": errors}


@check("heat_translation", "translation.translate_heat_closed", 1e-8)
def _heat_translation(rng):
    errors = {}
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        x = _ball_points(rng, 20, d, 2.0)
        y = _ball_points(rng, 20, d, 2.0)
        for t in (0.25, 1.0, 4.0):
            got = translate_z2d(mult, lambda p, t=t: np.exp(-t * _sq(p)), y, x, order=96)
            want = translate_heat_closed(mult, t, x, y)
            errors[f"{kappa}/t={t}"] = float(np.max(np.abs(got - want)) / np.max(np.abs(want)))
    return max(errors.values()), {"relative_error": errors}


@check("monomial_translation", "translation.translate_z2d", 1e-9)
def _monomial(rng):
    worst = 0.0
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        x = _ball_points(rng, 10, d, 3.0)
        y = _ball_points(rng, 10, d, 3.0)
        for j in range(d):
            exact = [
                translate_monomial_sd(d, kappa[0], [Fraction(v) for v in xi], [Fraction(v) for v in yi], j)
                for xi, yi in zip(x, y)
            ]
            got = translate_z2d(mult, lambda p, j=j: p[..., j], y, x)
            worst = max(worst, float(np.max(np.abs(got - np.array([float(v) for v in exact])))))
    return worst


def sd_counterexample_value(d, kappa):
    """tau_y (x_1^2) at x = e_1, y = (0, 2, ..., 2) for S_d: (1 - (d-2) kappa) / (d kappa + 1)."""
    kappa = Fraction(kappa)
    return (1 - (d - 2) * kappa) / (d * kappa + 1)


@check("sd_counterexample", "translation.translate_monomial_sd", 0.0)
def _sd_counterexample(rng):
    cases = [(2, Fraction(1)), (3, Fraction(1, 2)), (4, Fraction(2)), (3, Fraction(2))]
    mismatches = 0
    values = {}
    for d, kappa in cases:
        x = [1] + [0] * (d - 1)
        y = [0] + [2] * (d - 1)
        got = translate_monomial_sd(d, kappa, x, y, 0, 0)
        values[f"d={d},kappa={kappa}"] = str(got)
        if got != sd_counterexample_value(d, kappa):
            mismatches += 1
        # Positivity of tau_y fails exactly when (d - 2) kappa > 1.
        if (got < 0) != ((d - 2) * kappa > 1):
            mismatches += 1
    return float(mismatches), {"values": values}


@check("mass_conservation", "translation.translate_radial", 1e-6)
def _mass_conservation(rng):
    errors = {}
    for kappa in ((0.5,), (1.5,)):
        mult = _mult(kappa)
        f0 = bump_profile(1.0)
        p = radial_profile(mult, f0, support=1.0, n=256, label="bump")
        mass = p.integral()
        for y in (0.3, 0.7, 1.0, 1.5, 2.0):
            (nodes,), (weights,) = make_grid(mult, y + 1.25, 512)
            moved = translate_radial(mult, p, np.array([y]), nodes[:, None], order=256, tol=None)
            total = float(np.sum(moved * weights))
            errors[f"{kappa}/y={y}"] = abs(total - mass) / mass
    return max(errors.values()), {"relative_error": errors}


@check("support_growth", "translation.translate_z2d", 1e-6)
def _support_growth(rng):
    mult = _mult(SMALL[2])
    f = bump(1.0)
    grid = sample(mult, f, radius=5.0, n=32)
    pts = grid.points()
    y = np.array([2.0, 0.0]) @ np.array([[0.6, 0.8], [-0.8, 0.6]])
    cell = 2.0 * grid.radius / grid.shape[0]
    outside = pts[np.linalg.norm(pts, axis=1) > 3.0 + cell]
    moved = translate_z2d(mult, f, y, outside, order=24, tol=None)
    # The bump peaks at 1, so the absolute bound is already relative to its sup norm.
    return float(np.max(np.abs(moved))), {"points": int(outside.shape[0])}


@check("convolution_transform", "convolution.convolve", 1e-5)
def _convolution_transform(rng):
    errors = {}
    for kappa, radius, n in ((SMALL[1], 10.0, 64), (ATOMIC_AXIS, 8.0, 48)):
        mult = _mult(kappa)
        f = sample(mult, SUITE_FUNCTIONS["gauss_shifted"], radius=radius, n=n, label="gauss_shifted")
        k = heat_kernel(mult, 0.25)
        g = dilate(k.profile, k.eps)
        conv = convolve_on_grid(f, g)
        targets = rng.uniform(-3.0, 3.0, size=(10, mult.d))
        lhs = dunkl_transform(conv, targets)
        rhs = dunkl_transform(f, targets) * radial_dunkl_transform(g, targets)
        errors[str(kappa)] = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    return max(errors.values()), {"relative_error": errors}


@check("young_bound", "convolution.young_ratio", 1e-3)
def _young(rng):
    ratios = {}
    cases = (
        (SMALL[1], 12.0, 64, ("gauss", "odd", "two_bumps", "cos_modulated", "shifted_odd")),
        (ATOMIC_AXIS, 8.0, 32, ("gauss", "odd", "shifted_odd")),
    )
    for kappa, radius, n, names in cases:
        mult = _mult(kappa)
        k = heat_kernel(mult, 0.5)
        g = dilate(k.profile, k.eps)
        for name in names:
            f = sample(mult, SUITE_FUNCTIONS[name], radius=radius, n=n, label=name)
            for p in P_VALUES:
                ratios[f"{name}/{kappa}/p={p}"] = young_ratio(f, g, p)
    return max(ratios.values()) - 1.0, {"ratios": ratios}


@check("approximate_identity", "convolution.convergence_experiment", 1e-2)
def _approximate_identity(rng):
    finals = {}
    monotone = True
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        f = sample(mult, lambda x: np.exp(-_sq(x) / 32.0), radius=30.0, n=160 if d == 1 else 64, label="wide gaussian")
        kernels = [
            heat_kernel(mult, 0.5),
            poisson_kernel(mult, 1.0),
            bochner_riesz_kernel(mult, critical_index(mult) + 0.5),
            skewed_kernel(mult),
        ]
        for k in kernels:
            for p in P_VALUES:
                rows = convergence_experiment(f, k, p, freq_radius=3.0, freq_n=96 if d == 1 else 64)
                errs = [row["relative"] for row in rows]
                monotone &= all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
                finals[f"{k.family}/d{d}/p={p}"] = errs[-1]
    worst = max(finals.values())
    return worst, {"final_relative": finals, "monotone": monotone}, monotone and worst < 1e-2


@check("heat_equation", "summability.heat_kernel", 1e-4)
def _heat_equation(rng):
    worst = 0.0
    t, h = 0.5, 1e-3
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        f = sample(mult, SUITE_FUNCTIONS["gauss_shifted"], label="gauss_shifted")
        fhat = transform_to_grid(f)
        xi2 = _sq(fhat.points()).reshape(fhat.shape)

        def u(points, s):
            return np.real(inverse_dunkl_transform(fhat.with_values(fhat.values * np.exp(-s * xi2)), points))

        pts = rng.uniform(-2.0, 2.0, size=(50, d))
        lap = np.asarray(dunkl_laplacian_z2d(lambda p: u(p, t), mult, pts))
        dt = (u(pts, t + h) - u(pts, t - h)) / (2.0 * h)
        worst = max(worst, float(np.max(np.abs(lap - dt)) / np.max(np.abs(dt))))
    return worst


@check("bessel_eigenfunction", "kernel.dunkl_laplacian_z2d", 1e-4)
def _eigenfunction(rng):
    errors = {}
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        pts = rng.uniform(-3.0, 3.0, size=(30, d))
        for mu in (1.0, 3.0):

            def phi(p, mu=mu):
                return np.asarray(normalized_bessel(mult.lambda_k, mu * np.linalg.norm(p, axis=-1)))

            lap = np.asarray(dunkl_laplacian_z2d(phi, mult, pts))
            errors[f"{kappa}/mu={mu}"] = float(np.max(np.abs(lap + mu * mu * phi(pts))) / (mu * mu * np.max(np.abs(phi(pts)))))
    return max(errors.values()), {"relative_error": errors}


@check("translation_norm_bound", "translation.translation_norm_ratio", 1e-3)
def _norm_bound(rng):
    planar = [np.array(y) for y in ((0.5, 0.5), (1.0, -1.0), (0.0, 2.0))]
    cases = (
        (SMALL[1], 96, SUITE, [np.array([y]) for y in (0.5, 1.0, 2.0)]),
        (ATOMIC_AXIS, 48, ("gauss", "odd_pair", "shifted_odd", "anisotropic"), planar),
    )
    excess = 0.0
    worst = {}
    for kappa, n, names, shifts in cases:
        mult = _mult(kappa)
        top = 0.0
        for name in names:
            f = sample(mult, SUITE_FUNCTIONS[name], n=n, label=name)
            norms = {p: lp_norm(f, p) for p in P_VALUES}
            for y in shifts:
                moved = translated_grid(f, y)
                for p in P_VALUES:
                    top = max(top, lp_norm(moved, p) / norms[p])
        worst[str(kappa)] = top
        # The bound is 3 per axis; the measured excess over it is the defect.
        excess = max(excess, top / 3.0**mult.d - 1.0)
    return excess, {"max_ratio": worst}


@check("maximal_function", "maximal.maximal_function", 1e-8)
def _maximal(rng):
    mult = _mult(SMALL[1])
    f = sample(mult, dirac_like(0.25), radius=8.0, n=64, label="dirac_like")
    g = sample(mult, SUITE_FUNCTIONS["gauss_shifted"], radius=8.0, n=64, label="gauss_shifted")
    sched = grid_schedule(f)
    pts = rng.uniform(-3.0, 3.0, size=(8, 1))
    af = ball_averages(f, pts, sched)
    ag = ball_averages(g, pts, sched)
    afg = ball_averages(f.with_values(f.values + g.values), pts, sched)
    scale = float(np.max(np.abs(afg)))
    additivity = float(np.max(np.abs(afg - af - ag))) / scale
    negative = float(max(0.0, -np.min(afg))) / scale
    mf = maximal_function(f, pts, sched)
    homogeneity = float(np.max(np.abs(maximal_function(f.scaled(3.0), pts, sched) - 3.0 * mf)) / np.max(mf))
    weak = weak_type_experiment(f)
    fine = grid_schedule(f, 2 * len(sched))
    major = majorization_check(f, poisson_kernel(mult, 1.0), (0.1, 0.25, 0.5, 1.0, 2.0), pts[:4], sched)
    major_fine = majorization_check(f, poisson_kernel(mult, 1.0), (0.1, 0.25, 0.5, 1.0, 2.0), pts[:4], fine)
    shift = abs(major_fine["constant"] - major["constant"]) / major["constant"]
    detail = {
        "additivity": additivity,
        "homogeneity": homogeneity,
        "negative_average": negative,
        "weak_type_constant": weak["constant"],
        "majorization_constant": major["constant"],
        "refinement_shift": shift,
    }
    measured = max(additivity, homogeneity, negative)
    passed = measured <= 1e-8 and math.isfinite(weak["constant"]) and math.isfinite(major["constant"]) and shift < 1e-2
    return measured, detail, passed


@check("four_route_translation", "translation.translate_spectral", 1e-5)
def _four_routes(rng):
    errors = {}
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        gauss = lambda p: np.exp(-_sq(p) / 2.0)  # noqa: E731
        f = sample(mult, gauss, n=96 if d == 1 else 64, label="gaussian")
        p = radial_profile(mult, lambda r: np.exp(-np.asarray(r) ** 2 / 2.0), label="gaussian")
        y = _ball_points(rng, 1, d, 1.5)[0]
        x = _ball_points(rng, 10, d, 2.0)
        routes = {
            "explicit": np.asarray(translate_z2d(mult, gauss, y, x, order=64)),
            "radial": np.asarray(translate_radial(mult, p, y, x)),
            "spectral": np.real(translate_spectral(f, y, x)),
            "closed": np.asarray(translate_heat_closed(mult, 0.5, x, y)),
        }
        names = list(routes)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                errors[f"{kappa}/{a}-{b}"] = float(np.max(np.abs(routes[a] - routes[b])))
    return max(errors.values()), {"max_abs_difference": errors}


@check("heat_semigroup", "summability.heat_semigroup_residual", 1e-6)
def _heat_semigroup(rng):
    mult = _mult(SMALL[1])
    x = rng.uniform(-2.0, 2.0, size=(6, 1))
    return heat_semigroup_residual(mult, 0.25, 0.5, x, n=128)


@check("poisson_subordination", "summability.poisson_subordination", 1e-6)
def _subordination(rng):
    worst = 0.0
    for d, kappa in SMALL.items():
        mult = _mult(kappa)
        x = _ball_points(rng, 5, d, 3.0)
        k = poisson_kernel(mult, 1.0)
        for eps in (0.5, 1.0, 2.0):
            got = np.asarray(poisson_subordination(mult, eps, x))
            want = np.asarray(k.phi_eps(eps)(x))
            worst = max(worst, float(np.max(np.abs(got - want) / want)))
    return worst


def check_names():
    return list(CHECKS)


def run_checks(seed=0, names=None):
    """Run the registered checks (all, or those in `names`) and return CheckResults."""
    names = check_names() if names is None else list(names)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise DunklError(f"unknown check(s): {', '.join(unknown)}; see `dunklkit verify --list`")
    results = []
    for name in names:
        anchor, tolerance, fn = CHECKS[name]
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        out = fn(rng)
        elapsed = 1000.0 * (time.perf_counter() - start)
        if not isinstance(out, tuple):
            out = (out, {})
        measured, detail = float(out[0]), out[1]
        passed = bool(out[2]) if len(out) > 2 else measured <= tolerance
        results.append(CheckResult(name, anchor, measured, tolerance, passed, detail, elapsed))
        status = "PASS" if passed else "FAIL"
        log("Verify", f"{status} {name}: {measured:.3e} (tolerance {tolerance:g}, {elapsed:.0f} ms)")
        debug("Verify", f"{name} detail: {detail}")
    return results
