"""Exception types raised across the package."""


class SpecShapeError(Exception):
    """Base class for all package errors."""


class NonStarShaped(SpecShapeError, ValueError):
    """The radius function is not strictly positive on the check grid."""


class MeshTooCoarse(SpecShapeError, ValueError):
    pass


class ClusterTouchesTop(SpecShapeError):
    """The detected cluster reaches the last computed eigenvalue.

    The caller should request more eigenvalues and retry.
    """


class DependentTraces(SpecShapeError):
    """No set of points with numerically independent trace vectors exists."""


class SignatureFailed(SpecShapeError):
    pass


class Degenerate(SpecShapeError, ValueError):
    """A zero functional was passed to the positive-dependence test."""


class NoConvergence(SpecShapeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
