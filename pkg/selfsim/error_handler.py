import logging
from collections import Counter
from enum import Enum
from typing import Any, Dict, Optional


class ErrorSeverity(Enum):
    """Error severity levels for different types of failures"""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorType(Enum):
    """Categories of errors that can occur while analysing groups"""
    USAGE_ERROR = "usage_error"
    INPUT_ERROR = "input_error"
    CAP_ERROR = "cap_error"
    ALGEBRA_ERROR = "algebra_error"
    CONSISTENCY_ERROR = "consistency_error"
    CONFIG_ERROR = "config_error"


class SelfSimError(Exception):
    """Base class for every error raised by the toolkit."""

    error_type = ErrorType.ALGEBRA_ERROR
    severity = ErrorSeverity.MEDIUM

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context = context


class CapExceeded(SelfSimError):
    """A closure grew past the configured element cap."""
    error_type = ErrorType.CAP_ERROR
    severity = ErrorSeverity.HIGH


class TooLarge(SelfSimError):
    """An exhaustive routine was asked to work on a group above its hard guard."""
    error_type = ErrorType.CAP_ERROR
    severity = ErrorSeverity.HIGH


class DegreeMismatch(SelfSimError):
    error_type = ErrorType.INPUT_ERROR


class NotAPGroup(SelfSimError):
    error_type = ErrorType.ALGEBRA_ERROR


class GeneratorsDontGenerate(SelfSimError):
    error_type = ErrorType.ALGEBRA_ERROR


class NotSimple(SelfSimError):
    """The construction needs a simple virtual endomorphism."""
    error_type = ErrorType.ALGEBRA_ERROR


class TransversalError(SelfSimError):
    """Coset representatives that do not form a transversal of H."""
    error_type = ErrorType.INPUT_ERROR


class DegenerateRestriction(SelfSimError):
    """The image of f lies inside H, so the restriction has index 1."""
    error_type = ErrorType.ALGEBRA_ERROR
    severity = ErrorSeverity.LOW


class NotInH(SelfSimError):
    """A section t_i g t_j^-1 fell outside H: the transversal is broken."""
    error_type = ErrorType.CONSISTENCY_ERROR
    severity = ErrorSeverity.CRITICAL


class CatalogMismatch(SelfSimError):
    """A catalog construction disagrees with its recorded order or exponent."""
    error_type = ErrorType.CONSISTENCY_ERROR
    severity = ErrorSeverity.CRITICAL


class GroupFileError(SelfSimError):
    error_type = ErrorType.INPUT_ERROR


class UnknownCatalogEntry(SelfSimError):
    error_type = ErrorType.INPUT_ERROR


class ConfigurationError(SelfSimError):
    error_type = ErrorType.CONFIG_ERROR


# Exit code 1 is reserved for theorem violations
EXIT_CODES = {
    ErrorType.USAGE_ERROR: 2,
    ErrorType.INPUT_ERROR: 2,
    ErrorType.CAP_ERROR: 2,
    ErrorType.ALGEBRA_ERROR: 2,
    ErrorType.CONSISTENCY_ERROR: 2,
    ErrorType.CONFIG_ERROR: 2,
}


class ErrorHandler:
    """
    Turns toolkit errors into structured diagnostics and exit codes.
    Keeps per-type counts so batch runs can report what went wrong.
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger('selfsim.errors')
        self.error_counts: Counter = Counter()
        self.last_errors: Dict[ErrorType, Dict[str, Any]] = {}

    def handle_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> int:
        """Main error handling entry point; returns the exit code to use"""
        if isinstance(error, SelfSimError):
            error_type = error.error_type
            severity = error.severity
            details = dict(error.context)
        else:
            error_type = ErrorType.USAGE_ERROR
            severity = ErrorSeverity.HIGH
            details = {}
        details.update(context or {})

        error_info = {
            'error': str(error),
            'class': type(error).__name__,
            'type': error_type.value,
            'severity': severity.value,
            'context': details,
        }
        self._log_error(error_info)
        self.error_counts[error_type] += 1
        self.last_errors[error_type] = error_info
        return EXIT_CODES.get(error_type, 2)

    def describe(self, error: Exception) -> Dict[str, Any]:
        """Structured record for reports that keep going after an error"""
        if isinstance(error, SelfSimError):
            return {
                'class': type(error).__name__,
                'type': error.error_type.value,
                'message': str(error),
                'context': {k: _plain(v) for k, v in sorted(error.context.items())},
            }
        return {'class': type(error).__name__, 'type': 'unexpected', 'message': str(error)}

    def _log_error(self, error_info: Dict[str, Any]):
        """Log error with appropriate level based on severity"""
        severity = error_info['severity']
        message = f"[{error_info['type']}] {error_info['class']}: {error_info['error']}"
        if error_info['context']:
            message += f" {error_info['context']}"

        if severity == ErrorSeverity.CRITICAL.value:
            self.logger.critical(message)
        elif severity == ErrorSeverity.HIGH.value:
            self.logger.error(message)
        elif severity == ErrorSeverity.MEDIUM.value:
            self.logger.warning(message)
        else:
            self.logger.info(message)

    def get_error_summary(self) -> Dict[str, int]:
        return {k.value: v for k, v in sorted(self.error_counts.items(), key=lambda kv: kv[0].value)}


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
