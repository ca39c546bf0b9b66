"""Exception hierarchy shared by the solvers and the command line."""


class RobustWPTError(Exception):
    """Base class for all package errors."""


class DomainError(RobustWPTError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(RobustWPTError, RuntimeError):
    """An iterative method failed to reach its tolerance.

    ``diagnostics`` carries whatever the failing routine knew at exit
    (last iterate, residuals, iteration count).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class QuadratureError(ConvergenceError):
    pass


class RootFindingError(ConvergenceError):
    pass


class SingularJacobianError(ConvergenceError):
    pass


class InfiniteDivergenceError(RobustWPTError):
    """Raised only where a numeric answer is required but the divergence is infinite."""


class TableFormatError(DomainError):
    """Malformed tabulated pdf file; ``line`` is the 1-based offending line."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
