"""Asymptotic polar moduli ``lim |B A^m C|^(1/m)`` and their Lie-group counterpart."""
from . import asymlimit, config, errors, jordan, numlin
from .asymlimit import (
    ConvergenceReport,
    LimitResult,
    NayakProjections,
    diag_lower_limit,
    growth_exponent,
    iterate_limit,
    nayak_projections,
    perturbed_limit_property,
    predicted_limit_left,
    predicted_limit_right,
)
from .config import Tolerances, get_tolerances, set_tolerances, tolerances
from .jordan import JordanSpec, assemble, cmjd_from_spec, cmjd_numeric, power_scaled

__version__ = "0.1.0"

__all__ = [
    "ConvergenceReport",
    "JordanSpec",
    "LimitResult",
    "NayakProjections",
    "Tolerances",
    "assemble",
    "asymlimit",
    "cmjd_from_spec",
    "cmjd_numeric",
    "config",
    "diag_lower_limit",
    "errors",
    "get_tolerances",
    "growth_exponent",
    "iterate_limit",
    "jordan",
    "nayak_projections",
    "numlin",
    "perturbed_limit_property",
    "power_scaled",
    "predicted_limit_left",
    "predicted_limit_right",
    "set_tolerances",
    "tolerances",
]
