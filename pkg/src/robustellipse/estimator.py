"""Scikit-learn style wrappers around the functional API.

RobustEllipseFitter is the estimator face of :func:`solver.solve`:
``fit`` runs the network dynamics, fitted attributes expose the
recovered ellipse, and ``predict``/``decision_function`` classify
points as inliers/outliers by the same threshold level the penalty
uses. ConicFeatures is the stateless monomial lift, usable in
pipelines that want the algebraic-distance feature space.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .conic import algebraic_distances
from .lca import ThresholdConfig
from .solver import SolverConfig, solve
from .validation import as_points

__all__ = ["RobustEllipseFitter", "ConicFeatures"]


class RobustEllipseFitter(OutlierMixin, BaseEstimator):
    """Fit an ellipse to noisy 2-D points with a sparse residual penalty.

    Parameters
    ----------
    norm : {"l0", "l1", "l2"}, default "l0"
        Penalty on the algebraic distances. "l0" and "l1" resist
        outliers; "l2" is the constrained least-squares baseline.
    c0, c1, c2 : float
        Augmented-Lagrangian weights (coupling, unit-norm, discriminant).
    mu : float
        Euler step size.
    epsilon : float
        Negative slack target of the discriminant constraint.
    eta : float or None
        Sigmoid sharpness of the threshold; None keeps the norm preset
        (10000 for l0, exact dead zone for l1).
    lam : float
        Threshold level; residuals with |d| > lam count as outliers.
    max_iters, tol_residual, tol_state : stopping controls.
    random_state : int or None
        Seed for the random initialization (None means 0).

    Attributes
    ----------
    ellipse_ : GeometricEllipse
    conic_ : ndarray of shape (7,)
        Augmented coefficients (A..F, slack).
    report_ : FitReport
    state_ : NetworkState
        Final network state (useful for diagnostics).
    n_iter_ : int
    converged_ : bool

    Notes
    -----
    ``fit`` raises the solver's typed exceptions (Diverged,
    MaxItersExceeded, NotAnEllipse) instead of returning silently wrong
    parameters; catch them if failure is an acceptable outcome.
    """

    def __init__(self, norm: str = "l0", c0: float = 5.0, c1: float = 10.0,
                 c2: float = 10.0, mu: float = 1e-4, epsilon: float = -1e-12,
                 eta: float | None = None, lam: float = 1.0,
                 max_iters: int = 600_000, tol_residual: float = 1e-6,
                 tol_state: float = 1e-9, random_state: int | None = 0):
        self.norm = norm
        self.c0 = c0
        self.c1 = c1
        self.c2 = c2
        self.mu = mu
        self.epsilon = epsilon
        self.eta = eta
        self.lam = lam
        self.max_iters = max_iters
        self.tol_residual = tol_residual
        self.tol_state = tol_state
        self.random_state = random_state

    def _solver_config(self) -> SolverConfig:
        thr = ThresholdConfig.for_norm(self.norm, eta=self.eta, lam=self.lam)
        return SolverConfig(
            c0=self.c0, c1=self.c1, c2=self.c2, mu=self.mu,
            epsilon=self.epsilon, max_iters=self.max_iters,
            tol_residual=self.tol_residual, tol_state=self.tol_state,
            rng_seed=self.random_state if self.random_state is not None else 0,
            threshold=thr,
        )

    def fit(self, X, y=None):
        """Run the dynamics on X (shape (N, 2), N >= 5); returns self."""
        X = as_points(X, min_points=5, name="X")
        report, state = solve(X, self.norm, self._solver_config(),
                              return_state=True)
        self.n_features_in_ = 2
        self.report_ = report
        self.state_ = state
        self.ellipse_ = report.ellipse
        self.conic_ = report.alpha_tilde
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        return self

    def decision_function(self, X) -> np.ndarray:
        """lam - |algebraic distance|: positive for inliers."""
        check_is_fitted(self, "conic_")
        X = as_points(X, name="X")
        return self.lam - np.abs(algebraic_distances(self.conic_, X))

    def score_samples(self, X) -> np.ndarray:
        """Negative absolute algebraic distance (higher = more inlying)."""
        check_is_fitted(self, "conic_")
        X = as_points(X, name="X")
        return -np.abs(algebraic_distances(self.conic_, X))

    def predict(self, X) -> np.ndarray:
        """+1 for inliers (|distance| <= lam), -1 for outliers."""
        return np.where(self.decision_function(X) >= 0.0, 1, -1)


class ConicFeatures(TransformerMixin, BaseEstimator):
    """Lift (x, y) to the monomial basis (x^2, xy, y^2, x, y, 1, 0).

    The trailing slack column is constant zero so the features align
    with the augmented 7-vector used by the fitter.
    """

    def fit(self, X, y=None):
        as_points(X, name="X")
        self.n_features_in_ = 2
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        pts = as_points(X, name="X")
        x, y = pts[:, 0], pts[:, 1]
        return np.column_stack([x * x, x * y, y * y, x, y,
                                np.ones_like(x), np.zeros_like(x)])

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(["x^2", "x*y", "y^2", "x", "y", "1", "slack"],
                          dtype=object)
