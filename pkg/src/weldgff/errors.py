"""Exception types shared across the package."""


class DomainError(ValueError):
    """Evaluation point outside the declared domain of validity."""


class SingularMapError(ValueError):
    """A conformal map degenerates (vanishing derivative, lost injectivity)."""


class AccuracyError(RuntimeError):
    """A quadrature or iteration exhausted its budget before reaching tolerance."""


class ConfigurationError(ValueError):
    """Mutually inconsistent options (normalisation vs support, radii windows...)."""


class SolverError(RuntimeError):
    """An iterative solver failed to converge; carries the final residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class GeometryError(ValueError):
    """Curve input violates a geometric precondition (self-intersection etc.)."""


class ResolutionError(ValueError):
    """Requested scale finer than the discretisation can support."""
