"""Exception hierarchy shared by every bellkit module."""


class BellkitError(Exception):
    """Base class for all library errors."""


class NormalizationError(BellkitError):
    """A vector that must be unit-norm is not."""


class HermiticityError(BellkitError):
    """An operator that must be self-adjoint is not."""


class OrthonormalityError(BellkitError):
    """A set of basis vectors fails the Gram-matrix check."""


class DensityError(BellkitError):
    """A matrix is not a valid density operator."""


class LabelError(BellkitError):
    """Outcome labels are not the +/-1 labels an operation requires."""


class WeightError(BellkitError):
    """Mixture weights are negative or do not sum to one."""


class ProductRequiredError(BellkitError):
    """An operation that assumes product measurements received an entangled one."""


class DomainError(BellkitError):
    """A scalar argument lies outside its allowed interval."""


class DistributionError(BellkitError):
    """A probability vector is negative somewhere or does not sum to one."""


class SynthesisError(BellkitError):
    """Model synthesis could not reach the requested tolerance.

    ``best_residual`` holds the smallest max-abs probability error found.
    """

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


class ParseError(BellkitError):
    """Input text is not well-formed."""


class ValidationError(BellkitError):
    """Input is well-formed but violates a constraint; ``path`` names the field."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path
