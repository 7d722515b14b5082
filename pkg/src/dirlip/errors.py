"""Exception hierarchy shared by all modules."""


class DirlipError(ValueError):
    """Base class for input and numerical-resolution failures."""


class GridResolutionError(DirlipError):
    """An evaluation point lies too close to the circle for the grid."""


class FactorizationError(DirlipError):
    """Modulus data is too degenerate or the inner part is not a finite Blaschke product."""


class HypothesisError(DirlipError):
    """A function or arc family violates the standing hypotheses of a check."""


class PinchError(DirlipError):
    """The requested pinching tolerance could not be reached.

    Attributes
    ----------
    best_delta, best_error : float
        Scale and error of the best factor found before giving up.
    """

    def __init__(self, message, best_delta=None, best_error=None):
        super().__init__(message)
        self.best_delta = best_delta
        self.best_error = best_error
