"""Core package for hankel-gm."""

from .exceptions import (
    HankelGMException,
    DomainError,
    SamplingError,
    AccuracyError,
    ConvergenceError,
    PreconditionError,
    NotGeneralMonotoneError,
    ConfigurationError,
    CheckFailedError,
    ReportIOError,
)

__all__ = [
    "HankelGMException",
    "DomainError",
    "SamplingError",
    "AccuracyError",
    "ConvergenceError",
    "PreconditionError",
    "NotGeneralMonotoneError",
    "ConfigurationError",
    "CheckFailedError",
    "ReportIOError",
]
