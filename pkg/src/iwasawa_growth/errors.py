"""Exception types shared across the package."""


class ArtifactError(Exception):
    """Base class."""


class PrecisionError(ArtifactError):
    """Raised when a computation runs out of p-adic or pi-adic precision."""

    def __init__(self, message: str, achieved=None):
        super().__init__(message if achieved is None else f"{message} (achieved: {achieved})")
        self.achieved = achieved


class IndeterminateInvariants(ArtifactError):
    pass


class HypothesisViolation(ArtifactError):
    pass


class InvalidChangeOfBasis(ArtifactError):
    pass


class InconsistentSystem(ArtifactError):
    """A linear system has no solution, e.g. the input is not in the psi = 0 subspace."""
