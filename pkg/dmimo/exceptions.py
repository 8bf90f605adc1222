# -*- coding: utf-8 -*-
"""
Exception hierarchy for the simulator.
"""

from typing import Any, Dict, Optional


class DmimoException(Exception):
    """Base class of every error raised by the library."""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.details = details or {}

    def __str__(self):
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class NumericsException(DmimoException):
    """Decomposition did not converge or the input violates a numeric precondition."""

    def __init__(self, message: str = "Numerical failure",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "NUMERICS", details)


class NullSpaceException(NumericsException):
    """The interferer channel leaves too few null-space dimensions for one user."""

    def __init__(self, user: int, rank: int, available: int, required: int):
        super().__init__(
            f"user {user}: interferer rank r_k={rank} leaves {available} null-space "
            f"dimensions, {required} required",
            {"user": user, "rank": rank, "available": available, "required": required},
        )
        self.error_code = "NULL_SPACE"


class DimensionException(DmimoException):
    """Operand shapes are inconsistent."""

    def __init__(self, message: str = "Dimension mismatch",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "DIMENSION", details)


class ConfigValidationException(DmimoException):
    """A configuration file, preset or field value is invalid."""

    def __init__(self, message: str = "Invalid configuration",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "CONFIG", details)


class CodingException(DmimoException):
    """Malformed parity-check input or wrong payload length."""

    def __init__(self, message: str = "Coding error",
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "CODING", details)


class HarnessIOException(DmimoException):
    """Reading or writing an experiment artifact failed."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message}: {path}", "IO", {"path": path})
        self.path = path
