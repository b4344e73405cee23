"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


class TooFewPoints(ValueError):
    """Raised when a point set is too small to determine a conic."""


def as_points(obj, min_points: int = 0, name: str = "points") -> np.ndarray:
    """Coerce *obj* to a float64 array of shape (N, 2).

    Parameters
    ----------
    obj : array-like
        Anything ``np.asarray`` accepts. Must end up two-dimensional with
        exactly two columns (x, y).
    min_points : int
        Minimum number of rows; violations raise :class:`TooFewPoints`.
    name : str
        Label used in error messages.

    Returns
    -------
    ndarray of shape (N, 2), float64, C-contiguous.
    """
    pts = np.ascontiguousarray(obj, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(
            f"{name} must have shape (N, 2), got {pts.shape if pts.ndim else pts.size}"
        )
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite values")
    if pts.shape[0] < min_points:
        raise TooFewPoints(
            f"need at least {min_points} points to fit a conic, got {pts.shape[0]}"
        )
    return pts


def as_coeff_vector(obj, name: str = "coefficients") -> np.ndarray:
    """Coerce *obj* to a float64 vector of length 6 or 7.

    Length-6 vectors are the plain conic coefficients (A..F); length-7
    vectors carry the slack coordinate as the last entry.
    """
    v = np.ascontiguousarray(obj, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] not in (6, 7):
        raise ValueError(f"{name} must be a vector of length 6 or 7, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v
