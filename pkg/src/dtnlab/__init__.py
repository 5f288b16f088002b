"""Numerical laboratory for Dirichlet-to-Neumann operators on balls and surfaces of revolution."""

__version__ = "0.1.0"

from .ball_dtn import SpectralOperator, ball_identity_residual, boundary_laplacian, dtn_ball
from .errors import (
    ConsistencyError,
    DirichletEigenvalueError,
    DomainError,
    QuadratureWarning,
    RefinementError,
)
from .harmonics import HarmonicIndex, QuadratureRule, eval_basis, harmonic_basis, laplace_eigenvalue, quadrature

__all__ = [
    "__version__",
    "ConsistencyError",
    "DirichletEigenvalueError",
    "DomainError",
    "HarmonicIndex",
    "QuadratureRule",
    "QuadratureWarning",
    "RefinementError",
    "SpectralOperator",
    "ball_identity_residual",
    "boundary_laplacian",
    "dtn_ball",
    "eval_basis",
    "harmonic_basis",
    "laplace_eigenvalue",
    "quadrature",
]
