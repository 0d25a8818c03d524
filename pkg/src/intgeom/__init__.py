"""Numerical integral geometry of generalized intersection bodies.

Spherical harmonics and Funk-Hecke multipliers, Radon transforms on
Grassmannians, star bodies, membership tests for the classes I_k and BP_k,
and Monte Carlo checks of Grassmannian integration formulas.
"""

from .geometry import RngStream, Subspace, grassmann_volume, haar_subspace, omega
from .homogeneous_fourier import MultiplierTable, c_constant, multiplier, parseval_residual
from .membership import BPFeasibility, MembershipVerdict, bp_k_test, bp_sample, i_k_test, structure_product_check
from .petkantschin import PetkantschinConfig, delta_constant, lhs_estimate, rhs_estimate
from .report import VerificationReport, emit_report
from .starbody import Ball, Ellipsoid, LpBall, StarBody, central_section, k_radial_sum, linear_image

__version__ = "0.1.0"

__all__ = [
    "BPFeasibility",
    "Ball",
    "Ellipsoid",
    "LpBall",
    "MembershipVerdict",
    "MultiplierTable",
    "PetkantschinConfig",
    "RngStream",
    "StarBody",
    "Subspace",
    "VerificationReport",
    "bp_k_test",
    "bp_sample",
    "c_constant",
    "central_section",
    "delta_constant",
    "emit_report",
    "grassmann_volume",
    "haar_subspace",
    "i_k_test",
    "k_radial_sum",
    "lhs_estimate",
    "linear_image",
    "multiplier",
    "omega",
    "parseval_residual",
    "rhs_estimate",
    "structure_product_check",
]
