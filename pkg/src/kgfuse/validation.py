"""Small input-validation helpers used by the estimators and the CLI."""

import numpy as np

from .errors import NumericError


def check_positive(name, value, *, strict=True):
    """Validate a positive (or nonnegative when strict=False) scalar."""
    if strict and not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    if not strict and not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")
    return value


def check_unit_interval(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_paired(positives, negatives):
    """Positive/negative lists must be nonempty and position-paired."""
    if len(positives) == 0 or len(negatives) == 0:
        raise ValueError("positive and negative lists must be nonempty")
    if len(positives) != len(negatives):
        raise ValueError(
            f"positive/negative length mismatch: {len(positives)} vs {len(negatives)}"
        )


def ensure_finite(name, *arrays):
    """Raise NumericError if any array contains NaN or Inf."""
    for arr in arrays:
        a = np.asarray(arr, dtype=float)
        if not np.all(np.isfinite(a)):
            raise NumericError(f"non-finite values detected in {name}")
    return arrays[0] if len(arrays) == 1 else arrays
