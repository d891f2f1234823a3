"""Radial model: warped profile, mode equation, and per-mode scattering data."""
from .connection import (
    ConnectionData,
    ModeParams,
    accumulation_constant,
    c_lambda,
    connection_batch,
    connection_coeffs,
    default_match_point,
    hyperbolic_scattering,
    lattice_numerator,
    mode_scattering,
)
from .frobenius import DEFAULT_LATTICE_GUARD, frobenius_boundary, frobenius_center
from .profile import CUT_A, CUT_B, RadialProfile, profile_eval, smooth_step

__all__ = [
    "CUT_A", "CUT_B", "ConnectionData", "DEFAULT_LATTICE_GUARD", "ModeParams", "RadialProfile",
    "accumulation_constant", "c_lambda", "connection_batch", "connection_coeffs",
    "default_match_point", "frobenius_boundary", "frobenius_center", "hyperbolic_scattering",
    "lattice_numerator", "mode_scattering", "profile_eval", "smooth_step",
]
