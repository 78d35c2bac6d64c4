"""Exception types raised across the package."""


class ArrangementError(ValueError):
    """Base class for invalid arrangement input."""


class ZeroNormal(ArrangementError):
    pass


class DimensionMismatch(ArrangementError):
    pass


class AffineArrangement(ArrangementError):
    """Raised for hyperplanes with a nonzero offset; only central arrangements are supported."""


class NotARegion(ArrangementError):
    pass


class NotEssential(ValueError):
    pass


class FlatNotFound(KeyError):
    pass


class NotRank2(ValueError):
    pass


class ConvergenceFailure(RuntimeError):
    """The active-set iteration hit its cap, usually from degenerate geometry."""


class BadSpec(ValueError):
    pass
