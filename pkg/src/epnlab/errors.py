"""Exception hierarchy shared by all epnlab modules."""


class EpnlabError(Exception):
    """Base class for domain errors raised by epnlab."""


class InvalidDimensionError(EpnlabError, ValueError):
    pass


class InvalidEliminationError(EpnlabError, ValueError):
    """A polynomial has degree zero in the variable to be eliminated."""


class EliminationFailure(EpnlabError):
    """Elimination collapsed to the zero polynomial."""

    def __init__(self, msg, order=None):
        super().__init__(msg)
        self.order = order


class PreconditionError(EpnlabError, ValueError):
    pass


class ConvergenceError(EpnlabError):
    """An iterative method did not converge.

    ``iterates`` holds whatever the method had computed when it gave up.
    """

    def __init__(self, msg, iterates=None):
        super().__init__(msg)
        self.iterates = iterates


class SingularJacobianError(ConvergenceError):
    pass


class EPNotFoundError(EpnlabError):
    pass


class DegenerateSpectrumError(EpnlabError):
    """Spectrum is degenerate or complex where a diagonalizable H is required."""


class NormalizationError(EpnlabError):
    """Last-component normalization of an eigenvector is impossible."""


class ChainBreakError(EpnlabError):
    def __init__(self, msg, length):
        super().__init__(msg)
        self.length = length


class BranchError(EpnlabError, ValueError):
    pass


class CorridorExitError(EpnlabError):
    pass
