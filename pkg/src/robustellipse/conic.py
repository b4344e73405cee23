"""Conic representations and conversions.

An ellipse is handled in two forms:

* geometric: center (cx, cy), semi-axes a >= b > 0, rotation theta;
* algebraic: coefficients (A, B, C, D, E, F) of
  ``A x^2 + B xy + C y^2 + D x + E y + F = 0``, unit-norm with a fixed
  sign so the representation is unique.

The fitting machinery works on an augmented 7-vector ``(A..F, G)`` where
G is a slack coordinate that turns the open ellipse condition
``B^2 - 4AC < 0`` into the equality ``B^2 - 4AC + G^2 = eps`` for a small
negative eps. Points are lifted to the matching monomial 7-vector
``(x^2, xy, y^2, x, y, 1, 0)`` so the algebraic distance is a plain dot
product; the slack coordinate of a lifted point is always zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import TooFewPoints, as_coeff_vector, as_points

__all__ = [
    "GeometricEllipse",
    "NotAnEllipse",
    "DegenerateConic",
    "TooFewPoints",
    "PHI",
    "THETA",
    "algebraic_from_geometric",
    "geometric_from_algebraic",
    "lift_point",
    "build_design",
    "algebraic_distance",
    "algebraic_distances",
    "discriminant",
    "angle_distance",
]


class NotAnEllipse(ValueError):
    """Coefficients describe a non-elliptic conic (``B^2 - 4AC >= 0``)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DegenerateConic(ValueError):
    """Coefficients describe a degenerate conic (no real ellipse)."""


def _quadratic_form_matrices() -> tuple[np.ndarray, np.ndarray]:
    phi = np.diag([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0])
    theta = np.zeros((7, 7))
    # alpha' Theta alpha == B^2 - 4AC + G^2
    theta[:3, :3] = [[0.0, 0.0, -2.0], [0.0, 1.0, 0.0], [-2.0, 0.0, 0.0]]
    theta[6, 6] = 1.0
    phi.setflags(write=False)
    theta.setflags(write=False)
    return phi, theta


#: Quadratic form of the unit-norm constraint: alpha' PHI alpha == sum(A..F ** 2).
#: Quadratic form of the ellipse constraint: alpha' THETA alpha == B^2 - 4AC + G^2.
PHI, THETA = _quadratic_form_matrices()

# Near-circles make the rotation angle meaningless; below these cutoffs the
# canonical angle is pinned to zero.
_CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class GeometricEllipse:
    """Ellipse in center / semi-axes / rotation form.

    Attributes
    ----------
    cx, cy : float
        Center coordinates.
    a, b : float
        Semi-axis lengths, both strictly positive.
    theta : float
        Rotation of the a-axis from the x-axis, radians.

    The canonical form has ``a >= b`` and ``theta`` in ``[-pi/2, pi/2)``;
    :meth:`canonical` maps any valid instance onto it.
    """

    cx: float
    cy: float
    a: float
    b: float
    theta: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"semi-axes must be positive, got a={self.a}, b={self.b}")
        for name in ("cx", "cy", "a", "b", "theta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def canonical(self) -> "GeometricEllipse":
        """Return the equivalent ellipse with a >= b and theta in [-pi/2, pi/2)."""
        a, b, theta = self.a, self.b, self.theta
        if a < b:
            a, b = b, a
            theta += math.pi / 2
        theta = (theta + math.pi / 2) % math.pi - math.pi / 2
        if abs(a - b) < _CIRCLE_TOL:
            theta = 0.0
        return GeometricEllipse(self.cx, self.cy, a, b, theta)

    def boundary(self, t) -> np.ndarray:
        """Boundary points at parameter values *t* (array-like), shape (len(t), 2)."""
        t = np.asarray(t, dtype=np.float64)
        ct, st = np.cos(t), np.sin(t)
        cth, sth = math.cos(self.theta), math.sin(self.theta)
        x = self.cx + self.a * cth * ct - self.b * sth * st
        y = self.cy + self.a * sth * ct + self.b * cth * st
        return np.column_stack([x, y])


def _raw_coefficients(e: GeometricEllipse) -> np.ndarray:
    """Unnormalized conic coefficients of *e* (implicit-equation expansion)."""
    ct, st = math.cos(e.theta), math.sin(e.theta)
    ia2, ib2 = 1.0 / e.a**2, 1.0 / e.b**2
    A = ct * ct * ia2 + st * st * ib2
    B = 2.0 * st * ct * (ia2 - ib2)
    C = st * st * ia2 + ct * ct * ib2
    D = -2.0 * A * e.cx - B * e.cy
    E = -B * e.cx - 2.0 * C * e.cy
    F = A * e.cx**2 + B * e.cx * e.cy + C * e.cy**2 - 1.0
    return np.array([A, B, C, D, E, F])


def algebraic_from_geometric(e: GeometricEllipse) -> np.ndarray:
    """Convert to unit-norm algebraic coefficients (A..F).

    The returned vector has unit Euclidean norm and a fixed sign: A > 0,
    falling back to the first nonzero entry being positive. For an actual
    ellipse A is always nonzero, so the fallback only matters for callers
    reusing the normalization on other conics.
    """
    alpha = _raw_coefficients(e)
    alpha /= np.linalg.norm(alpha)
    for v in alpha:
        if v != 0.0:
            if v < 0.0:
                alpha = -alpha
            break
    return alpha


def geometric_from_algebraic(alpha) -> GeometricEllipse:
    """Recover center / semi-axes / rotation from algebraic coefficients.

    Accepts a length-6 vector or a length-7 augmented vector (the slack
    coordinate is ignored). Scale-invariant: any positive multiple of the
    coefficients gives the same ellipse.

    Raises
    ------
    NotAnEllipse
        If ``B^2 - 4AC >= 0``.
    DegenerateConic
        If the conic is elliptic but has no real, positive-area solution.
    """
    alpha = as_coeff_vector(alpha)
    A, B, C, D, E, F = (float(v) for v in alpha[:6])
    disc = B * B - 4.0 * A * C
    if disc >= 0.0:
        raise NotAnEllipse(f"discriminant B^2-4AC = {disc:g} is not negative")

    if abs(B) < _CIRCLE_TOL and abs(A - C) < _CIRCLE_TOL:
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(B, A - C)

    # Center solves [[-2A, -B], [-B, -2C]] @ c = (D, E); the determinant
    # is 4AC - B^2 = -disc > 0 for an ellipse.
    det = -disc
    cx = (-2.0 * C * D + B * E) / det
    cy = (B * D - 2.0 * A * E) / det

    # Shared numerator of both squared semi-axes. The -F term (rather
    # than a fixed constant) keeps the recovery scale-invariant.
    num = A * cx * cx + B * cx * cy + C * cy * cy - F
    ct, st = math.cos(theta), math.sin(theta)
    den_a = A * ct * ct + B * st * ct + C * st * st
    den_b = A * st * st - B * st * ct + C * ct * ct
    a2 = num / den_a if den_a != 0.0 else -1.0
    b2 = num / den_b if den_b != 0.0 else -1.0
    if a2 <= 1e-12 or b2 <= 1e-12:
        raise DegenerateConic(
            f"squared semi-axes {a2:g}, {b2:g} are not strictly positive"
        )
    return GeometricEllipse(cx, cy, math.sqrt(a2), math.sqrt(b2), theta).canonical()


def lift_point(x: float, y: float) -> np.ndarray:
    """Monomial lift (x^2, xy, y^2, x, y, 1, 0) of a single point."""
    return np.array([x * x, x * y, y * y, x, y, 1.0, 0.0])


def build_design(points) -> np.ndarray:
    """Stack lifted points into the 7 x N design matrix.

    Column i is ``lift_point(points[i])``; the slack row (row 6) is all
    zeros. Requires at least 5 points.
    """
    pts = as_points(points, min_points=5)
    x, y = pts[:, 0], pts[:, 1]
    return np.ascontiguousarray(
        np.stack([x * x, x * y, y * y, x, y, np.ones_like(x), np.zeros_like(x)])
    )


def algebraic_distance(alpha, point) -> float:
    """Signed algebraic distance of one point from the conic *alpha*."""
    alpha = as_coeff_vector(alpha)
    x, y = float(point[0]), float(point[1])
    A, B, C, D, E, F = alpha[:6]
    return float(A * x * x + B * x * y + C * y * y + D * x + E * y + F)


def algebraic_distances(alpha, points) -> np.ndarray:
    """Signed algebraic distances of many points, shape (N,)."""
    alpha = as_coeff_vector(alpha)
    pts = as_points(points)
    x, y = pts[:, 0], pts[:, 1]
    A, B, C, D, E, F = alpha[:6]
    return A * x * x + B * x * y + C * y * y + D * x + E * y + F


def discriminant(alpha) -> float:
    """Conic discriminant ``B^2 - 4AC`` (negative for ellipses)."""
    alpha = as_coeff_vector(alpha)
    A, B, C = alpha[:3]
    return float(B * B - 4.0 * A * C)


def angle_distance(t1: float, t2: float) -> float:
    """Distance between two axis orientations, wrapped modulo pi.

    Ellipse rotations are only defined up to half a turn, so the metric
    folds the difference into [0, pi/2].
    """
    d = abs(t1 - t2) % math.pi
    return min(d, math.pi - d)
