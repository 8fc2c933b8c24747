"""Exception hierarchy shared by all modules."""


class FCSError(Exception):
    """Base class for every error raised by this package."""


class SolveFailed(FCSError):
    """The invariant auxiliary state could not be determined."""


class NullspaceDegenerate(SolveFailed):
    """More than one invariant state exists."""


class NullspaceIllConditioned(NullspaceDegenerate):
    """The invariant state is unique but too weakly separated to resolve in double precision."""


class NullspaceEmpty(SolveFailed):
    """No singular value of the fixed-point map fell below tolerance."""


class NotPositive(SolveFailed):
    """The normalized invariant candidate is not positive semidefinite."""


class CapExceeded(FCSError, ValueError):
    pass


class BadSubset(FCSError, ValueError):
    pass


class BadShape(FCSError, ValueError):
    pass


class UnsupportedDimension(FCSError, ValueError):
    pass


class OutOfRange(FCSError, ValueError):
    pass


class NonConvergence(FCSError):
    """An eigen-solver did not converge."""


class AllStartsFailed(FCSError):
    """Every run of a multi-start optimization raised."""
