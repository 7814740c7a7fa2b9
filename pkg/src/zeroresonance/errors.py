"""Exception hierarchy shared by all computation paths."""


class ResonanceError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ResonanceError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PrecisionError(ResonanceError, ArithmeticError):
    """A requested enclosure width could not be reached."""


class CertificationError(ResonanceError):
    """A monotonicity hypothesis needed for a Leibniz bound could not be verified."""


class ConvergenceError(ResonanceError, ArithmeticError):
    """An iterative solver failed to converge within its iteration budget."""


class AdmissibilityError(ResonanceError, ValueError):
    """A potential violates the decay or integrability assumptions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
