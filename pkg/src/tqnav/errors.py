"""Exception types shared across the package."""


class TqnavError(Exception):
    """Base class for all package-specific errors."""


class NonUnitQuaternion(TqnavError):
    """A quaternion expected to be unit-norm deviates beyond tolerance."""


class NonUnitTrident(TqnavError):
    """A trident quaternion violates the unit-structure invariants."""


class ScalarResidueTooLarge(TqnavError):
    """State recovery produced a vector quaternion with a non-negligible scalar."""


class OutOfDomain(TqnavError):
    """Chebyshev argument outside [-1, 1]."""


class InsufficientNodes(TqnavError):
    """Too few sample nodes for the requested fit degree."""


class SingularFit(TqnavError):
    """Least-squares fit matrix is rank deficient (e.g. repeated timestamps)."""


class DegreeTooHigh(TqnavError):
    """Requested polynomial degree exceeds what the sample count supports."""


class NearSingularPosition(TqnavError):
    """Position query too close to the earth's center for the gravity model."""


class PolarSingularity(TqnavError):
    """Local-level curvature is undefined at the poles."""


class ConvergenceFailure(TqnavError):
    """An iterative routine exhausted its iteration budget."""


class InvalidStep(TqnavError):
    """Integrator step size is non-positive or does not divide the interval."""


class GridMismatch(TqnavError):
    """Error series to be compared do not share a common time grid."""
