"""Dunkl analysis for the reflection group Z2^d: kernels, transform, translation,
convolution, summability and maximal functions."""

__version__ = "0.3.0"

from .errors import (
    ConfigError,
    DecayWarning,
    DimensionMismatchError,
    DomainError,
    DunklError,
    HypothesisViolationError,
)
from .foundation import Multiplicity, make_multiplicity
from .grid import GridFunction, RadialProfile, make_grid, radial_profile, sample
from .kernel import kernel_z2d, kernel_real_z2d, intertwine_z2d, dunkl_derivative_z2d, dunkl_laplacian_z2d
from .transform import dunkl_transform, inverse_dunkl_transform, transform_to_grid, hankel_transform, lp_norm
from .translation import translate_z2d, translate_radial, translate_spectral, translate_heat_closed
from .convolution import convolve, convolve_on_grid
from .summability import SummabilityKernel, make_kernel, summability_apply
from .maximal import maximal_function, weak_type_experiment, majorization_check
from .config import ExperimentConfig, load_config

__all__ = [
    "__version__",
    "ConfigError",
    "DecayWarning",
    "DimensionMismatchError",
    "DomainError",
    "DunklError",
    "HypothesisViolationError",
    "Multiplicity",
    "make_multiplicity",
    "GridFunction",
    "RadialProfile",
    "make_grid",
    "radial_profile",
    "sample",
    "kernel_z2d",
    "kernel_real_z2d",
    "intertwine_z2d",
    "dunkl_derivative_z2d",
    "dunkl_laplacian_z2d",
    "dunkl_transform",
    "inverse_dunkl_transform",
    "transform_to_grid",
    "hankel_transform",
    "lp_norm",
    "translate_z2d",
    "translate_radial",
    "translate_spectral",
    "translate_heat_closed",
    "convolve",
    "convolve_on_grid",
    "SummabilityKernel",
    "make_kernel",
    "summability_apply",
    "maximal_function",
    "weak_type_experiment",
    "majorization_check",
    "ExperimentConfig",
    "load_config",
]
