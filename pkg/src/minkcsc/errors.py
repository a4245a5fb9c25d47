"""Exception hierarchy shared across the package."""


class MinkcscError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(MinkcscError, ValueError):
    """Operands live in spaces of different dimension."""


class SignatureError(MinkcscError, ValueError):
    """A basis or bilinear form does not have the expected (d,1) signature."""


class FrameError(MinkcscError, ValueError):
    """A frame violates the fibre, lagrangian or independence invariants."""


class SpacelikeError(MinkcscError, ValueError):
    """A height field or boundary trace violates the spacelike margin."""


class BoundaryIndexError(MinkcscError, IndexError):
    """A jet was requested too close to the grid boundary."""


class ConvergenceError(MinkcscError, RuntimeError):
    """An iterative solve failed to converge.

    Carries an optional ``report`` with the iteration history and, for
    continuation runs, the partial results computed before the failure.
    """

    def __init__(self, message, report=None, partial=None, failed_index=None):
        super().__init__(message)
        self.report = report
        self.partial = partial
        self.failed_index = failed_index


class BranchError(MinkcscError, RuntimeError):
    """A Newton iterate left the locally strictly convex branch."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalError(MinkcscError, RuntimeError):
    """A computation exceeded its guaranteed numerical tolerance."""
