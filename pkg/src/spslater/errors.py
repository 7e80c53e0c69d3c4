"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A problem parameter violates its admissibility condition."""


class GridMismatchError(ValueError):
    """Two objects built on different radial grids were combined."""


class NoRootError(RuntimeError):
    """The fiber constraint has no positive root (empty constraint set)."""


class KernelAccuracyError(RuntimeError):
    """Angular quadrature for kernel entries failed to converge."""


class TruncationWarning(UserWarning):
    """A dilation pushed significant mass beyond the grid radius."""
