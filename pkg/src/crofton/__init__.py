"""Intrinsic volumes of convex bodies from sections through a fixed subspace."""
from .bodies import Ball, Box, ConvexBody, HPolytope, SupportBody, exact_intrinsic_volume
from .constants import alpha_const, b_coeff, c0_const, crofton_const, d_const, kappa, omega
from .estimate import Estimate, merge_estimates
from .estimators import (
    EstimatorSpec,
    Indices,
    RotationalCroftonEstimator,
    VerticalSectionsEstimator,
    measurement_phi,
    measurement_phi_projection,
    measurement_phi_radial,
    measurement_phi_volume,
    rotational_crofton_estimate,
    vertical_measurement_tilde,
    vertical_sections_estimate,
)
from .exceptions import DegenerateInputError, DomainError, NotAvailableError
from .geometry import Flat, Subspace, make_rng
from .verify import CheckReport, run_battery

__version__ = "0.1.0"

__all__ = [
    "Ball", "Box", "ConvexBody", "HPolytope", "SupportBody", "exact_intrinsic_volume",
    "alpha_const", "b_coeff", "c0_const", "crofton_const", "d_const", "kappa", "omega",
    "Estimate", "merge_estimates",
    "EstimatorSpec", "Indices", "RotationalCroftonEstimator", "VerticalSectionsEstimator",
    "measurement_phi", "measurement_phi_projection", "measurement_phi_radial", "measurement_phi_volume",
    "rotational_crofton_estimate", "vertical_measurement_tilde", "vertical_sections_estimate",
    "DegenerateInputError", "DomainError", "NotAvailableError",
    "Flat", "Subspace", "make_rng", "CheckReport", "run_battery",
]
