"""Small input-validation helpers used by the estimator-style API."""

import numpy as np

from .exceptions import DimensionMismatchError, InvalidParameterError


def check_series(x, name="series") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    return arr


def check_matrix(x, name="X") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    return arr


def check_positive_int(value, name) -> int:
    if int(value) != value or value < 1:
        raise InvalidParameterError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_spins(spins, n_magnets, name="state") -> np.ndarray:
    """Coerce to an int8 vector of +/-1 of the expected length."""
    arr = np.asarray(spins)
    if arr.shape != (n_magnets,):
        raise DimensionMismatchError(
            f"{name} has shape {arr.shape}, expected ({n_magnets},)"
        )
    if not np.all(np.abs(arr) == 1):
        raise InvalidParameterError(f"{name} entries must be -1 or +1")
    return arr.astype(np.int8)
