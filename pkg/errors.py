class LabError(Exception):
    """Base class of every error raised by the laboratory."""

    exit_code = 1


class ConfigurationError(LabError):
    exit_code = 2


class ParameterOrderError(ConfigurationError):
    pass


class ResolutionError(LabError):
    exit_code = 2


class SectorMismatchError(LabError):
    exit_code = 2


class UnsupportedOrderError(LabError):
    exit_code = 2


class ContractViolation(LabError):
    exit_code = 2


class DegenerateInputError(LabError):
    exit_code = 2


class SchemaError(LabError):
    """
    Raised when an input file does not match its record schema.

    :param path: The offending file.
    :param diagnostics: One entry per failing field, formatted as ``location: message``.
    """

    exit_code = 2

    def __init__(self, path: str, diagnostics: list[str]):
        self.path = path
        self.diagnostics = diagnostics
        super().__init__(f"{path}: " + "; ".join(diagnostics))


class NumericRangeError(LabError):
    exit_code = 3


class NoConvergenceError(LabError):
    """
    Raised when Newton's method hits its iteration cap.

    :param message: Human readable description.
    :param last_residual: Residual norm at the final iterate.
    :param iterations: Number of iterations performed.
    """

    exit_code = 3

    def __init__(self, message: str, last_residual: float, iterations: int):
        self.last_residual = last_residual
        self.iterations = iterations
        super().__init__(f"{message} (last residual {last_residual:.3e} after {iterations} iterations)")


class ContinuationBreakdownError(LabError):
    exit_code = 3


class DerivativeUnavailableError(LabError):
    exit_code = 3


class SolvabilityError(LabError):
    """
    Raised when a right-hand side has a component in the numerical kernel.

    :param projection: Norm of the kernel component, relative to the rhs norm.
    :param theta_index: Index of the obstructing kernel vector, when known.
    """

    exit_code = 3

    def __init__(self, projection: float, theta_index: int | None = None):
        self.projection = projection
        self.theta_index = theta_index
        where = "" if theta_index is None else f" for kernel vector {theta_index}"
        super().__init__(f"Right-hand side has kernel component {projection:.3e}{where}.")


class StorageError(LabError):
    exit_code = 4


__all__ = [
    "LabError",
    "ConfigurationError",
    "ParameterOrderError",
    "ResolutionError",
    "SectorMismatchError",
    "UnsupportedOrderError",
    "ContractViolation",
    "DegenerateInputError",
    "SchemaError",
    "NumericRangeError",
    "NoConvergenceError",
    "ContinuationBreakdownError",
    "DerivativeUnavailableError",
    "SolvabilityError",
    "StorageError",
]
