"""Closed-form Laplace-transform solution of the N-dimensional radial problem for
V(r) = a r^2 + b r - c/r, checked against a finite-difference oracle."""
from .closed_form import (
    energy_eigenvalue,
    exact_solvability_constraint,
    identity_residuals,
    normalization_constant,
    radial_wavefunction,
    rms_radius,
)
from .model import Channel, PotentialParams

__all__ = [
    "Channel",
    "PotentialParams",
    "energy_eigenvalue",
    "exact_solvability_constraint",
    "identity_residuals",
    "normalization_constant",
    "radial_wavefunction",
    "rms_radius",
]
__version__ = "0.1.0"
