"""Exception hierarchy shared by every module of the package."""


class MGError(Exception):
    """Base class for all package errors."""


class DomainError(MGError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on) a pole of a gamma factor."""


class ConvergenceError(MGError, ArithmeticError):
    """An iterative or adaptive procedure did not reach its tolerance."""


class NoSeparatingLineError(DomainError):
    """No vertical line separates the left and right pole sets of a Mellin-Barnes integrand."""


class DegeneratePolesError(MGError):
    """Residue summation refused: some left poles are not simple."""


class PrecisionLossError(MGError, ArithmeticError):
    """Residue summation refused: cancellation would destroy the requested accuracy."""


class CrossCheckError(MGError, ArithmeticError):
    """Two independent evaluation routes disagree beyond tolerance."""


class CombinationOverflowError(MGError):
    """The term-combination enumeration would exceed the configured cap."""


class TargetUnreachableError(MGError):
    """A fit could not meet its error target within the allowed number of terms."""


class ConfigError(MGError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
