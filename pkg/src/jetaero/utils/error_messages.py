"""
Translation of exceptions into stderr text, log lines and CLI exit codes.
"""
from typing import Optional, Dict, Any
import re

from jetaero import errors as jet_errors
from jetaero.config import ConfigurationError


EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_NON_FINITE = 4
EXIT_SCENARIO_FAILED = 5


class ErrorMessageMapper:
    """Class-level tables: message patterns and exception-to-exit-code rules."""

    # regex on the exception text -> message and action
    ERROR_PATTERNS = {
        # Model files
        r'cycle|parent equals child|not reachable|more than one root': {
            'user_message': 'The joint graph of the model is not a tree.',
            'action': 'Check the parent/child links of every joint directive.'
        },
        r'mass must be positive|inertia .* not positive definite': {
            'user_message': 'A link has invalid inertial parameters.',
            'action': 'Check the mass= and inertia= fields of the reported link.'
        },
        r'unknown directive|expected key=value|missing field': {
            'user_message': 'The model file does not follow the expected grammar.',
            'action': 'Fix the reported line; directives are link, joint, jet, symmetry, pair, group, posture, gravity.'
        },

        # Datasets
        r'malformed header|column count': {
            'user_message': 'The dataset file is malformed.',
            'action': 'Regenerate the dataset with the generate-dataset command.'
        },
        r'non-finite value': {
            'user_message': 'The dataset contains NaN or infinite values.',
            'action': 'Regenerate the dataset; hand-edited files are not supported.'
        },

        # Training and fitting
        r'non-finite loss': {
            'user_message': 'Training diverged.',
            'action': 'Lower the learning rate or check the dataset scale.'
        },
        r'too few samples|distinct angles': {
            'user_message': 'Not enough data to fit the aerodynamic model.',
            'action': 'Use a dataset with a denser wind-direction grid.'
        },

        # Control and simulation
        r'rank': {
            'user_message': 'The controller lost control authority.',
            'action': 'Inspect the jet configuration and joint limits in the scenario.'
        },
        r'non-finite simulator state': {
            'user_message': 'The simulation diverged.',
            'action': 'Reduce the plant time step or the controller gains.'
        },

        # File system errors
        r'no such file|not found': {
            'user_message': 'A required file was not found.',
            'action': 'Verify that the path exists.'
        },
        r'permission denied|access denied': {
            'user_message': 'No permission to access the file.',
            'action': 'Check the file permissions or choose another location.'
        },
    }

    # Exception type -> exit code, checked in order (subclasses before bases)
    EXIT_CODES = (
        (jet_errors.NonFiniteLossError, EXIT_NON_FINITE),
        (jet_errors.IntegrationFault, EXIT_NON_FINITE),
        (jet_errors.ModelParseError, EXIT_VALIDATION),
        (jet_errors.ModelValidationError, EXIT_VALIDATION),
        (jet_errors.UnknownLinkError, EXIT_VALIDATION),
        (jet_errors.DatasetError, EXIT_VALIDATION),
        (jet_errors.FitError, EXIT_VALIDATION),
        (jet_errors.CoeffsFormatError, EXIT_VALIDATION),
        (jet_errors.WeightsFormatError, EXIT_VALIDATION),
        (jet_errors.DimensionMismatchError, EXIT_VALIDATION),
        (jet_errors.ScenarioError, EXIT_VALIDATION),
        (jet_errors.ReportSchemaError, EXIT_VALIDATION),
        (jet_errors.ControllerFault, EXIT_SCENARIO_FAILED),
        (ConfigurationError, EXIT_VALIDATION),
        (OSError, EXIT_IO),
        (ValueError, EXIT_VALIDATION),
    )

    DEFAULT_USER_MESSAGE = 'An unexpected error occurred.'
    DEFAULT_ACTION = 'Check the log file for details.'

    @classmethod
    def get_user_friendly_message(cls, error: Exception, context: Optional[Dict[str, Any]] = None) -> Dict[str, str]:
        """
        Message and suggested action for `error`.

        Patterns are tried first, then the exception type. jetaero errors
        fall back to their own text, anything else to a generic message.
        """
        text = str(error)
        for pattern, info in cls.ERROR_PATTERNS.items():
            if re.search(pattern, text, re.IGNORECASE):
                return {'message': info['user_message'], 'action': info.get('action', cls.DEFAULT_ACTION)}

        if isinstance(error, FileNotFoundError):
            return {'message': 'File not found.', 'action': 'Verify that the file exists at the given location.'}
        if isinstance(error, PermissionError):
            return {'message': 'No permission to access the resource.', 'action': 'Check the file or folder permissions.'}
        if isinstance(error, jet_errors.JetAeroError):
            return {'message': text, 'action': cls.DEFAULT_ACTION}
        return {'message': cls.DEFAULT_USER_MESSAGE, 'action': cls.DEFAULT_ACTION}

    @classmethod
    def get_exit_code(cls, error: Exception) -> int:
        for error_type, code in cls.EXIT_CODES:
            if isinstance(error, error_type):
                return code
        return EXIT_UNEXPECTED

    @classmethod
    def format_error_for_user(cls, error: Exception, context: Optional[Dict[str, Any]] = None) -> str:
        """
        Text printed on stderr.

        The first line is always ``error: <exception text>`` so paths and
        line numbers stay visible; the friendly message and action follow.
        """
        info = cls.get_user_friendly_message(error, context)
        lines = [f"error: {error}"]
        if info['message'] != str(error):
            lines.append(info['message'])
        lines.append(info['action'])
        return "\n".join(lines)

    @classmethod
    def get_log_message(cls, error: Exception, context: Optional[Dict[str, Any]] = None) -> str:
        """``Type: message | Context: k=v, ...`` for the log file."""
        parts = [f"{type(error).__name__}: {error}"]
        if context:
            parts.append("Context: " + ", ".join(f"{k}={v}" for k, v in context.items()))
        return " | ".join(parts)
