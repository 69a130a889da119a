"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
import numbers

import numpy as np


def check_positive_levels(levels, name="levels"):
    """Return ``levels`` as a 1-d float array, rejecting non-positive entries.

    The error message carries the 1-based index of the first offending level.
    """
    arr = np.asarray(levels, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0]) + 1
        raise ValueError(f"{name}[{bad}] is not finite")
    bad = np.flatnonzero(arr <= 0)
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"{name}[{i + 1}] = {arr[i]!r} is not positive")
    return arr


def check_scalar(x, name, *, min_val=None, max_val=None, include_min=True,
                 integer=False):
    if integer:
        if not isinstance(x, numbers.Integral) or isinstance(x, bool):
            raise TypeError(f"{name} must be an integer, got {x!r}")
    elif not isinstance(x, numbers.Real) or isinstance(x, bool):
        raise TypeError(f"{name} must be a real number, got {x!r}")
    if not np.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    if min_val is not None:
        if (x < min_val) if include_min else (x <= min_val):
            op = ">=" if include_min else ">"
            raise ValueError(f"{name} must be {op} {min_val}, got {x!r}")
    if max_val is not None and x > max_val:
        raise ValueError(f"{name} must be <= {max_val}, got {x!r}")
    return x


def check_hermitian(M, tol=1e-12):
    """Return ``M`` as a square complex array after checking hermiticity.

    ``tol`` is relative to the largest entry magnitude.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    dev = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if dev > tol * max(scale, 1e-300):
        raise ValueError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3e})")
    return M


def frozen(arr):
    """Mark an array read-only and return it."""
    arr.setflags(write=False)
    return arr
