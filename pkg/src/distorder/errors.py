"""Exception types shared across the solver modules."""


class DistorderError(Exception):
    """Base class for all library errors."""


class DomainError(DistorderError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class BranchError(DomainError):
    """Complex argument fell on the branch cut of the principal logarithm."""


class KernelBoundError(DistorderError, AssertionError):
    """A sampled point violated one of the proven kernel inequalities."""


class QuadratureError(DistorderError, ArithmeticError):
    """A load/norm integral produced non-finite or non-converged values."""


class NotApplicableError(DistorderError, ValueError):
    """Operation requested for data outside its regularity class."""


class SingularMatrixError(DistorderError, ArithmeticError):
    """Tridiagonal elimination hit a vanishing pivot."""


class MeshMismatchError(DistorderError, ValueError):
    """Fine mesh is not a refinement of the coarse mesh."""


class ContourOverflowError(DistorderError, ArithmeticError):
    """exp(z*t) on the contour would overflow double precision."""


class ToleranceError(DistorderError, ArithmeticError):
    """A numerically-certified tolerance (e.g. FFT imaginary residue) was exceeded."""


class WeightGridMismatchError(DistorderError, ValueError):
    """Convolution weights were generated for a different time grid."""


class DegenerateFitError(DistorderError, ValueError):
    """Too few points (or non-decaying data) to fit the requested model."""
