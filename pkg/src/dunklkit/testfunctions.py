"""Named test functions: a suite of 20 smooth, rapidly decaying functions and compact bumps.

Every function takes points of shape (..., d) for any d and is decayed below
1e-10 of its peak on the default box of radius 12.
"""

import numpy as np

from .errors import DomainError


def _sq(x, center=0.0):
    x = np.asarray(x, dtype=float) - center
    return np.sum(x * x, axis=-1)


def _axis(x, i=0):
    return np.asarray(x, dtype=float)[..., i]


def _last(x):
    return np.asarray(x, dtype=float)[..., -1]


def _gauss(a, center=0.0):
    return lambda x: np.exp(-a * _sq(x, center))


def _anisotropic(x):
    x = np.asarray(x, dtype=float)
    a = 0.3 + 0.2 * np.arange(x.shape[-1])
    return np.exp(-np.sum(a * x * x, axis=-1))


def _ridge(x):
    x = np.asarray(x, dtype=float)
    u = np.ones(x.shape[-1]) / np.sqrt(x.shape[-1])
    return np.exp(-((x @ u) ** 2) - 0.5 * _sq(x))


def _shifted_axis(x, shift):
    x = np.asarray(x, dtype=float)
    e = np.zeros(x.shape[-1])
    e[0] = shift
    return x - e


SUITE_FUNCTIONS = {
    "gauss": _gauss(0.5),
    "gauss_narrow": _gauss(1.0),
    "gauss_wide": _gauss(0.25),
    "gauss_shifted": lambda x: np.exp(-0.5 * _sq(_shifted_axis(x, 0.75))),
    "odd": lambda x: _axis(x) * np.exp(-0.5 * _sq(x)),
    "odd_pair": lambda x: _axis(x) * _last(x) * np.exp(-0.5 * _sq(x)),
    "radial_quadratic": lambda x: _sq(x) * np.exp(-0.5 * _sq(x)),
    "quartic": lambda x: (1.0 + _axis(x) ** 4) * np.exp(-0.6 * _sq(x)),
    "anisotropic": _anisotropic,
    "two_bumps": lambda x: np.exp(-_sq(x, 1.0)) + 0.5 * np.exp(-_sq(x, -1.0)),
    "cos_modulated": lambda x: np.cos(2.0 * _axis(x)) * np.exp(-0.5 * _sq(x)),
    "sin_modulated": lambda x: np.sin(1.5 * _axis(x)) * np.exp(-0.5 * _sq(x)),
    "cubic": lambda x: _axis(x) ** 3 * np.exp(-0.5 * _sq(x)),
    "mixed": lambda x: (_axis(x) - 0.5 * _axis(x) ** 2) * np.exp(-0.4 * _sq(x)),
    "damped_rational": lambda x: np.exp(-0.5 * _sq(x)) / (1.0 + _sq(x)),
    "laguerre": lambda x: (1.0 - 0.5 * _sq(x)) * np.exp(-0.5 * _sq(x)),
    "ridge": _ridge,
    "shifted_odd": lambda x: _axis(_shifted_axis(x, 0.3)) * np.exp(-0.5 * _sq(_shifted_axis(x, 0.3))),
    "linear_tilt": lambda x: (1.0 + 0.3 * np.sum(np.asarray(x, dtype=float), axis=-1)) * np.exp(-0.5 * _sq(x)),
    "gauss_offset": _gauss(0.8, -0.5),
}

SUITE = tuple(SUITE_FUNCTIONS)


def bump(radius=1.0):
    """exp(1 - 1/(1 - |x|^2/radius^2)) inside the ball, 0 outside; peak 1 at the origin."""
    if radius <= 0:
        raise DomainError(f"bump radius must be positive, got {radius}")

    def f(x):
        s = _sq(x) / radius**2
        inside = s < 1.0
        out = np.zeros(np.shape(s))
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    return f


def bump_profile(radius=1.0):
    """The radial profile r -> bump(|x| = r)."""
    if radius <= 0:
        raise DomainError(f"bump radius must be positive, got {radius}")

    def f0(r):
        s = (np.asarray(r, dtype=float) / radius) ** 2
        inside = s < 1.0
        out = np.zeros(np.shape(s))
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    return f0


def dirac_like(width=0.25):
    """Narrow Gaussian with unit peak, a point-mass approximant."""
    if width <= 0:
        raise DomainError(f"width must be positive, got {width}")
    return lambda x: np.exp(-_sq(x) / (2.0 * width**2))


_EXTRA = {"bump": bump(), "dirac_like": dirac_like()}


def get_test_function(name):
    """Look up a suite function, `bump` or `dirac_like` by name."""
    if name in SUITE_FUNCTIONS:
        return SUITE_FUNCTIONS[name]
    if name in _EXTRA:
        return _EXTRA[name]
    known = ", ".join(SUITE + tuple(_EXTRA))
    raise DomainError(f"unknown test function {name!r}; known: {known}")


def _radial(f):
    return lambda r: f(np.asarray(r, dtype=float)[..., None])


# Radial members, as profiles r -> f(|x| = r); the suite functions depend on |x| only.
RADIAL_PROFILES = {
    name: _radial(SUITE_FUNCTIONS[name])
    for name in ("gauss", "gauss_narrow", "gauss_wide", "radial_quadratic", "damped_rational", "laguerre")
}
RADIAL_PROFILES["bump"] = bump_profile()
RADIAL_PROFILES["dirac_like"] = _radial(_EXTRA["dirac_like"])

# e^{-a |x|^2} members with their rate a, for the closed-form translation.
GAUSSIAN_RATES = {"gauss": 0.5, "gauss_narrow": 1.0, "gauss_wide": 0.25, "dirac_like": 8.0}


def resolve(name, bump_radius=1.0):
    """(function, radial profile or None, Gaussian rate or None) for a named test function."""
    if name == "bump":
        return bump(bump_radius), bump_profile(bump_radius), None
    return get_test_function(name), RADIAL_PROFILES.get(name), GAUSSIAN_RATES.get(name)
