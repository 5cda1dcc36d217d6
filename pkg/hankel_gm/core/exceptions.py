"""Custom exception classes for hankel-gm."""

from datetime import datetime, timezone
from typing import Optional, Dict, Any

# Process exit codes surfaced by the CLI.
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


class HankelGMException(Exception):
    """Base exception class for library and harness errors."""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_NUMERICAL,
        error_type: str = "HANKEL_GM_ERROR",
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.error_type = error_type
        self.code = code
        self.details = details or {}
        self.timestamp = datetime.now(timezone.utc)

        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Error document printed by the CLI."""
        return {
            "error": self.error_type,
            "message": self.message,
            "code": self.code,
            "details": self.details,
            "timestamp": self.timestamp.isoformat(),
        }


class DomainError(HankelGMException):
    """Exception for arguments outside the mathematical domain of an operation."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=EXIT_CONFIGURATION,
            error_type="DOMAIN_ERROR",
            code="DOMAIN_VIOLATION",
            details=details
        )


class SamplingError(HankelGMException):
    """Exception for non-finite values met while sampling a function."""

    def __init__(self, node: float, value: Any, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"Non-finite value {value!r} at node x={node!r}",
            exit_code=EXIT_CONFIGURATION,
            error_type="SAMPLING_ERROR",
            code="NON_FINITE_SAMPLE",
            details={"node": node, **details} if details else {"node": node}
        )


class AccuracyError(HankelGMException):
    """Exception for evaluations that could not reach the requested tolerance."""

    def __init__(self, message: str, achieved_error: float, details: Optional[Dict[str, Any]] = None):
        self.achieved_error = achieved_error
        super().__init__(
            message=message,
            exit_code=EXIT_NUMERICAL,
            error_type="ACCURACY_ERROR",
            code="TOLERANCE_NOT_REACHED",
            details={"achieved_error": achieved_error, **details} if details else {"achieved_error": achieved_error}
        )


class ConvergenceError(HankelGMException):
    """Exception for improper integrals whose truncation sequence does not settle."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(
            message=message,
            exit_code=EXIT_NUMERICAL,
            error_type="CONVERGENCE_ERROR",
            code="TRUNCATION_NOT_CONVERGENT",
            details=self.diagnostics
        )


class PreconditionError(HankelGMException):
    """Exception for a violated hypothesis of a check."""

    def __init__(self, hypothesis: str, message: str, details: Optional[Dict[str, Any]] = None):
        self.hypothesis = hypothesis
        super().__init__(
            message=message,
            exit_code=EXIT_CONFIGURATION,
            error_type="PRECONDITION_ERROR",
            code="HYPOTHESIS_VIOLATED",
            details={"hypothesis": hypothesis, **details} if details else {"hypothesis": hypothesis}
        )


class NotGeneralMonotoneError(HankelGMException):
    """Exception raised when the GM ratio profile is unbounded."""

    def __init__(self, message: str, profile: Any = None):
        self.profile = profile
        super().__init__(
            message=message,
            exit_code=EXIT_CHECK_FAILED,
            error_type="NOT_GENERAL_MONOTONE",
            code="GM_CERTIFICATION_FAILED",
            details={"profile": profile.model_dump() if hasattr(profile, "model_dump") else profile}
        )


class ConfigurationError(HankelGMException):
    """Exception for invalid experiment configuration."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=EXIT_CONFIGURATION,
            error_type="CONFIGURATION_ERROR",
            code="INVALID_CONFIGURATION",
            details=details
        )


class CheckFailedError(HankelGMException):
    """Exception for a check whose verdict is a failure."""

    def __init__(self, check: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=EXIT_CHECK_FAILED,
            error_type="CHECK_FAILED",
            code="CHECK_FAILED",
            details={"check": check, **details} if details else {"check": check}
        )


class ReportIOError(HankelGMException):
    """Exception for report persistence errors."""

    def __init__(self, path: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=f"{path}: {message}",
            exit_code=EXIT_CONFIGURATION,
            error_type="REPORT_IO_ERROR",
            code="REPORT_IO_FAILED",
            details={"path": path, **details} if details else {"path": path}
        )
