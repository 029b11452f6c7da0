"""Exception hierarchy shared by all modules."""


class KoehlerError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(KoehlerError, ValueError):
    """Malformed matrix, semigroup table or parameter."""


class ConvergenceError(KoehlerError):
    """An iterative solver hit its iteration cap."""


class NotPowerBoundedError(KoehlerError, ValueError):
    pass


class NotPositiveError(KoehlerError, ValueError):
    pass


class IllConditionedSplitError(KoehlerError):
    """Two spectral groups are too close to be separated reliably."""

    def __init__(self, gap, threshold):
        self.gap = gap
        self.threshold = threshold
        super().__init__(
            f"eigenvalue groups separated by {gap:.3e} < threshold {threshold:.1e}"
        )


class IllConditionedProjectionError(KoehlerError):
    pass


class HorizonError(KoehlerError):
    """The probed power horizon was too short for the requested certificate."""


class CapExceededError(KoehlerError):
    pass


class CollapseError(KoehlerError):
    """Epsilon-collapse of float elements produced a non-associative table."""


class InternalInconsistencyError(KoehlerError):
    pass


class UnsupportedInputError(KoehlerError, ValueError):
    pass
