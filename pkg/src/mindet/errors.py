"""Exception and warning types raised across the package."""


class MindetError(Exception):
    """Base class for all package errors."""


class InvalidSpec(MindetError, ValueError):
    """A spec or type invariant is violated at construction time."""


class GridMismatch(MindetError, ValueError):
    """Operands live on different grids, or a target grid is too small."""


class GridIncompatible(MindetError, ValueError):
    """Grids have incompatible spacing (e.g. theta spacing differs from x spacing)."""


class SupportOverflow(MindetError, ValueError):
    """A generator's support does not fit inside the padded region of its grid."""


class SupportsOverlap(MindetError, ValueError):
    """Two functions that must have disjoint support share a grid point."""


class NotADensity(MindetError, ValueError):
    """Samples violate nonnegativity, normalization or reality beyond tolerance."""


class InvalidCharFn(MindetError, ValueError):
    """Samples violate the characteristic-function invariants."""


class NoCompactSupport(MindetError, ValueError):
    """A characteristic function does not vanish at the edge of its grid."""


class OrderTooHigh(MindetError, ValueError):
    """Requested moment or operator order exceeds the supported cap."""


class LambdaTooSmall(MindetError, ValueError):
    """Perturbation frequency does not exceed the charfun support extent."""


class ThetaOffGrid(MindetError, ValueError):
    """A flow parameter is not an integer multiple of the grid spacing."""


class FlowLeavesGrid(MindetError, ValueError):
    """An evolved function would carry nonzero samples off the grid."""


class GridTooLarge(MindetError, ValueError):
    """Grid exceeds the dense-matrix oracle cap."""


class SupportLeak(MindetError, ArithmeticError):
    """Operator output has more mass outside the input support than allowed."""


class CrossTermLeak(MindetError, ArithmeticError):
    """A disjoint-support cross term exceeds the failure threshold."""


class ConditionViolated(MindetError, ValueError):
    """A user supplied perturbation fails the moment-annihilation gate."""


class EmptyFamily(MindetError, ValueError):
    """Verification was requested for a family with no members."""


class ConfigInvalid(MindetError, ValueError):
    """An experiment config or command-line flag is malformed."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class EdgeSupport(RuntimeWarning):
    """A function is not negligible at the edge of its periodic window.

    Issued as a warning: spectral results are still returned, but wraparound
    contaminates them.
    """


class CrossTermWarning(RuntimeWarning):
    """A cross term lies between the assertion and failure thresholds."""
