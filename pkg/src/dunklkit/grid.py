"""Sampled functions: tensor-grid samples with weighted quadrature, and radial profiles."""

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DimensionMismatchError, DomainError
from .foundation import make_multiplicity
from .log import debug, log
from .quadrature import box_rule, radial_rule

DEFAULT_RADIUS = 12.0
DEFAULT_POINTS = 96
DEFAULT_RADIAL_POINTS = 256
# Radial truncation: smallest doubling R with |f0(R)| R^(2 lam + 1) below this.
RADIAL_TAIL = 1e-12


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of f on a tensor grid symmetric about 0, with the h_k^2 dx weights.

    `func` is kept when the samples came from a callable, so that off-grid
    evaluation (translations, interpolated comparisons) stays exact.
    """

    mult: object
    axes: tuple
    axis_weights: tuple
    values: np.ndarray
    radius: float
    func: object = None
    label: str = ""

    @property
    def d(self):
        return self.mult.d

    @property
    def shape(self):
        return tuple(a.size for a in self.axes)

    @property
    def quad_weights(self):
        w = self.axis_weights[0]
        for wi in self.axis_weights[1:]:
            w = np.multiply.outer(w, wi)
        return w

    def points(self):
        """All grid nodes as an (M, d) array in C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DimensionMismatchError(f"expected points of dimension {self.d}, got {x.shape[-1]}")
        if self.func is not None:
            return self.func(x)
        flat = x.reshape(-1, self.d)
        out = self._interpolator(self.values.real)(flat)
        if np.iscomplexobj(self.values):
            out = out + 1j * self._interpolator(self.values.imag)(flat)
        return out.reshape(x.shape[:-1])

    def _interpolator(self, values):
        return RegularGridInterpolator(self.axes, values, bounds_error=False, fill_value=0.0)

    def with_values(self, values, func=None, label=None):
        values = np.asarray(values)
        if values.shape != self.shape:
            raise DimensionMismatchError(f"values of shape {values.shape} do not fit grid {self.shape}")
        return dataclasses.replace(self, values=values, func=func, label=self.label if label is None else label)

    def scaled(self, c):
        func = None if self.func is None else (lambda x, f=self.func: c * f(x))
        return self.with_values(c * self.values, func=func)

    def same_grid(self, other):
        return (
            self.mult.matches(other.mult)
            and self.shape == other.shape
            and all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes))
        )


def make_grid(mult, radius=DEFAULT_RADIUS, n=DEFAULT_POINTS):
    """Per-axis nodes and weights of the default box grid."""
    rules = box_rule(mult.kappa, radius, n)
    return tuple(r[0] for r in rules), tuple(r[1] for r in rules)


def sample(mult, func, radius=DEFAULT_RADIUS, n=DEFAULT_POINTS, label=""):
    """Sample `func` (vectorized over (..., d) points) on the box grid."""
    axes, weights = make_grid(mult, radius, n)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    values = np.asarray(func(mesh))
    return GridFunction(mult, axes, weights, values, float(radius), func, label)


def zeros_like(f, dtype=complex):
    return f.with_values(np.zeros(f.shape, dtype=dtype))


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """f(x) = f0(|x|) with a radial rule for r^(2 lam + 1) dr."""

    f0: object
    mult: object
    rule: object
    label: str = ""
    support: float = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.f0(np.linalg.norm(x, axis=-1))

    def values(self):
        return np.asarray(self.f0(self.rule.nodes))

    def integral(self):
        """Integral of f h_k^2 over R^d, through polar coordinates."""
        return float(self.rule.integrate(self.values())) / self.mult.a_k

    def mass(self):
        """c_h times `integral`, the normalization used by approximate identities."""
        return self.mult.c_h * self.integral()

    def to_grid(self, radius=DEFAULT_RADIUS, n=DEFAULT_POINTS):
        return sample(self.mult, self, radius, n, label=self.label)


def _auto_radius(f0, lam, start=1.0, limit=400.0):
    r = start
    while r < limit:
        tail = abs(float(f0(np.asarray(r)))) * r ** (2.0 * lam + 1.0)
        if tail < RADIAL_TAIL:
            return r
        r *= 2.0
    return limit


def radial_profile(mult, f0, r_max=None, scale=None, n=DEFAULT_RADIAL_POINTS, support=None, endpoint_power=0.0, label=""):
    """Build a RadialProfile.

    `support` marks a profile vanishing beyond that radius (the rule then
    stops there). Otherwise `scale` picks the mapped half-line rule, and with
    neither r_max is found by doubling until the tail is negligible.
    """
    lam = mult.lambda_k
    if support is not None:
        rule = radial_rule(lam, n, r_max=support, endpoint_power=endpoint_power)
    elif scale is not None:
        rule = radial_rule(lam, n, scale=scale)
    else:
        if r_max is None:
            r_max = _auto_radius(f0, lam)
            debug("Transform", f"radial truncation for {label or 'profile'} at R={r_max:g}")
        rule = radial_rule(lam, n, r_max=r_max)
    return RadialProfile(f0, mult, rule, label, support)


def save_grid(f, path):
    """Write `path`.csv (x_1..x_d, re, im) and a `path`.json header describing the grid."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pts = f.points()
    vals = np.asarray(f.values, dtype=complex).ravel()
    table = np.column_stack([pts, vals.real, vals.imag])
    names = [f"x{i + 1}" for i in range(f.d)] + ["re", "im"]
    np.savetxt(path.with_suffix(".csv"), table, delimiter=",", header=",".join(names), comments="", fmt="%.17g")
    header = {
        "dimension": f.d,
        "kappa": list(f.mult.kappa),
        "truncation": f.radius,
        "grid_shape": list(f.shape),
        "label": f.label,
    }
    path.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n")
    log("Output", f"wrote grid {f.label or ''} {f.shape} to {path.with_suffix('.csv')}")


def load_grid(path):
    """Read a grid written by `save_grid`; nodes are checked against the rule they claim."""
    path = Path(path)
    header = json.loads(path.with_suffix(".json").read_text())
    mult = make_multiplicity(header["dimension"], header["kappa"], verify=False)
    shape = tuple(header["grid_shape"])
    if len(set(shape)) != 1:
        raise DomainError(f"only cubic grids can be reloaded, got shape {shape}")
    axes, weights = make_grid(mult, header["truncation"], shape[0])
    table = np.loadtxt(path.with_suffix(".csv"), delimiter=",", skiprows=1, ndmin=2)
    d = mult.d
    expected = GridFunction(mult, axes, weights, np.zeros(shape), header["truncation"]).points()
    if table.shape != (expected.shape[0], d + 2) or not np.allclose(table[:, :d], expected, rtol=1e-14, atol=1e-14):
        raise DimensionMismatchError(f"{path.with_suffix('.csv')} does not match its header grid")
    values = (table[:, d] + 1j * table[:, d + 1]).reshape(shape)
    if not np.any(values.imag):
        values = values.real
    return GridFunction(mult, axes, weights, values, float(header["truncation"]), None, header.get("label", ""))
