"""Exception hierarchy for the scsa package."""


class ScsaError(Exception):
    """Base class for every error raised by this package."""


class SignalError(ScsaError, ValueError):
    """The input signal does not satisfy a structural precondition."""


class NonFiniteSample(SignalError):
    pass


class NonPositiveSpacing(SignalError):
    pass


class TooFewSamples(SignalError):
    pass


class NonUniformGrid(SignalError):
    pass


class HypothesisViolation(SignalError):
    """A signal failed one of the hypotheses (nonnegativity, decay)."""


class GridMismatch(SignalError):
    pass


class NonPositiveChi(ScsaError, ValueError):
    pass


class MatrixTooLarge(ScsaError, ValueError):
    pass


class ConvergenceFailure(ScsaError, RuntimeError):
    def __init__(self, index, iterations):
        self.index = index
        self.iterations = iterations
        super().__init__(
            f"inverse iteration for eigenpair {index} did not converge "
            f"in {iterations} iterations"
        )


class PropositionViolation(ScsaError, RuntimeError):
    """A computed level kappa^2/chi exceeded the signal maximum.

    This can only happen through an assembly or solver bug, so it is
    treated as an internal-consistency alarm rather than an input error.
    """


class TargetUnreachable(ScsaError):
    """No tested chi produced the requested number of eigenvalues.

    ``bracket`` holds ``(chi_lo, n_lo, chi_hi, n_hi)`` for the tightest
    bracket found, so callers can report or retry from it.
    """

    def __init__(self, message, bracket):
        self.bracket = bracket
        super().__init__(message)


class ReportError(ScsaError, ValueError):
    """A serialized analysis report is malformed or inconsistent."""
