"""Exception hierarchy shared by the solvers, the LP core and the corpus."""


class LPBundleError(Exception):
    """Base class for all errors raised by :mod:`lpbundle`.

    Solver runs that abort attach the partial run report as ``report``.
    """

    report = None


class DimensionMismatch(LPBundleError, ValueError):
    pass


class NumericalFailure(LPBundleError):
    """The LP could not be solved to the requested tolerances."""


class SizeExceeded(LPBundleError, ValueError):
    """A brute-force reference routine was asked to handle too large an instance."""


class DivisionGuard(LPBundleError, ZeroDivisionError):
    """The model reduction in a ratio test was not positive."""


class BacktrackExhausted(LPBundleError):
    pass


class NotSmoothHere(LPBundleError):
    """The finite-difference check was requested at a (near) kink."""


class ProblemUnavailable(LPBundleError):
    """The problem's oracle could not be provided (see its ``note``)."""


class BudgetExceeded(LPBundleError):
    """The LP-solve or evaluation budget ran out; ``report`` holds the best state reached."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
