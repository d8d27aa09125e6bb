"""Input validation helpers and the package exception types."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


class DomainError(ValueError):
    """Raised when a numeric argument lies outside an operation's domain."""


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


def check_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


def check_positive(name: str, value: float, *, allow_zero: bool = False) -> float:
    value = float(value)
    if math.isnan(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise DomainError(f"{name} must be {bound}, got {value!r}")
    return value


def check_unitary(u: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DomainError("matrix has non-finite entries")
    residual = np.max(np.abs(u.conj().T @ u - np.eye(2)))
    if residual > tol:
        raise DomainError(f"matrix is not unitary (residual {residual:.3g})")
    return u


def as_float_array(name: str, values: Iterable[float]) -> np.ndarray:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr
