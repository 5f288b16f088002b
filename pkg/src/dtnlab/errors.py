"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DirichletEigenvalueError(ArithmeticError):
    """Zero is (numerically) a Dirichlet eigenvalue of the Schrodinger operator.

    The Dirichlet-to-Neumann map is undefined there, so the solve is refused
    rather than regularized.
    """

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class RefinementError(ValueError):
    """The requested resolution cannot resolve the geometry."""


class ConsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


class QuadratureWarning(UserWarning):
    """A quadrature rule appears too coarse for the integrand."""
