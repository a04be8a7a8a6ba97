"""Exception hierarchy shared by every jetaero sub-package."""
from typing import Optional


class JetAeroError(Exception):
    """Base class for all domain errors raised by jetaero."""


class ModelParseError(JetAeroError):
    """A model file line does not follow the grammar."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class ModelValidationError(JetAeroError):
    """A parsed model violates one of the robot model invariants."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("Model validation failed: " + "; ".join(self.errors))


class UnknownLinkError(JetAeroError, KeyError):
    """A link name does not exist in the model."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown link"


class DatasetError(JetAeroError):
    """Dataset content is inconsistent or unusable for the requested operation."""


class DatasetFormatError(DatasetError):
    """A dataset file is malformed (header, column count, non-finite value)."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class FitError(JetAeroError):
    """The aerodynamic regression cannot be carried out."""


class DimensionMismatchError(JetAeroError, ValueError):
    """Array shapes do not match the declared architecture or model."""


class NonFiniteLossError(JetAeroError):
    """Training produced a NaN or infinite loss."""

    def __init__(self, epoch: int, value: float):
        self.epoch = epoch
        self.value = value
        super().__init__(f"non-finite loss {value} at epoch {epoch}")


class ControllerFault(JetAeroError):
    """The flight controller cannot produce a command (e.g. allocation rank collapse)."""


class IntegrationFault(JetAeroError):
    """The simulator state became non-finite."""

    def __init__(self, step_index: int, message: str = "non-finite simulator state"):
        self.step_index = step_index
        super().__init__(f"{message} at step {step_index}")


class ScenarioError(JetAeroError):
    """A scenario, gains or oracle configuration file is invalid."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class ReportSchemaError(JetAeroError):
    """Simulation logs handed to the report do not share one schema."""


class CoeffsFormatError(JetAeroError):
    """A coefficients file line does not follow the `coeffs <link> w0=.. w5=..` grammar."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class WeightsFormatError(JetAeroError):
    """A network weights file is truncated or does not start with the MLP1 header."""
