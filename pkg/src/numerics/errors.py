# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Exception hierarchy shared by the numerical modules; the CLI maps it to exit codes


class LabError(Exception):
    """Base class for every error raised on purpose by the lab."""
    exit_code = 1


class DomainError(LabError, ValueError):
    """Input outside the domain of an operation (e.g. Re z <= 0)."""
    exit_code = 2


class GuardViolation(LabError):
    """A regime, resolution or stability guard failed. The message names the inequality."""
    exit_code = 2

    def __init__(self, message: str, constraint: str = ""):
        super().__init__(message)
        self.constraint = constraint


class BudgetExceeded(LabError):
    """A term/triple/quintuple cap would be exceeded."""
    exit_code = 2

    def __init__(self, message: str, coverage: float = 0.0):
        super().__init__(f"{message} (coverage {coverage:.3%})")
        self.coverage = coverage


class KernelError(LabError, ValueError):
    """A kernel was used on the resonant stratum without an explicit value at 0."""
    exit_code = 2


class ToleranceFailure(LabError):
    """Quadrature or resolution could not reach the requested tolerance."""
    exit_code = 3

    def __init__(self, message: str, achieved: float = float("nan")):
        super().__init__(f"{message} (achieved {achieved:.3e})")
        self.achieved = achieved


class ConfigError(LabError):
    """A scenario file or override does not match the schema. The message names the key path."""
    exit_code = 2
