"""Small input-validation helpers shared by the public API."""

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import SuperoscError


def check_positive(value, name, *, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise SuperoscError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise SuperoscError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise SuperoscError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_int(value, name, *, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise SuperoscError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise SuperoscError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_interval(lo, hi):
    lo, hi = float(lo), float(hi)
    if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
        raise SuperoscError(f"interval must satisfy lo < hi, got [{lo}, {hi}]")
    return lo, hi


def check_points(t, values=None, *, name="t"):
    """Validate 1-D sample locations (and optional matching values).

    Accepts a flat sequence or a single-column 2-D array, the latter being
    the shape scikit-learn passes through pipelines.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim == 2:
        if t.shape[1] != 1:
            raise SuperoscError(f"{name} must have a single feature column, got shape {t.shape}")
        t = t[:, 0]
    t = check_array(t.reshape(-1, 1), ensure_min_samples=1)[:, 0]
    if values is None:
        return t
    values = np.asarray(values)
    if values.ndim != 1 or values.shape[0] != t.shape[0]:
        raise SuperoscError(
            f"values must be 1-D with {t.shape[0]} entries, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise SuperoscError("values contain non-finite entries")
    return t, values


def check_state(vec, name, *, atol=1e-12):
    """Return a complex 1-D copy of ``vec``; it must have unit norm."""
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.size == 0 or not np.all(np.isfinite(vec)):
        raise SuperoscError(f"{name} must be a non-empty finite vector")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > atol:
        raise SuperoscError(f"{name} must have unit norm, got {norm!r}")
    return vec


def normalized(vec):
    vec = np.asarray(vec, dtype=complex).ravel()
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise SuperoscError("cannot normalize the zero vector")
    return vec / norm
