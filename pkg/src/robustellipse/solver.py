"""Constrained network dynamics for robust ellipse fitting.

The fit is posed as: minimize a sparsity penalty of the algebraic
distances z = X'alpha subject to the coupling constraint z = X'alpha,
a unit-norm constraint on the coefficients and the slack-augmented
ellipse constraint. The augmented Lagrangian

    L = psi(z) + zeta'(z - X'alpha)
        + beta (alpha'PHI alpha - 1) + gamma (alpha'THETA alpha - eps)
        + c0/2 ||z - X'alpha||^2
        + c1/2 (alpha'PHI alpha - 1)^2 + c2/2 (alpha'THETA alpha - eps)^2

is integrated as an ODE: decision variables flow down the gradient,
multipliers flow up, with explicit Euler steps of size mu. The
non-smooth penalty gradient never appears; the threshold identity
``psi'(z) == u - z`` replaces it (see :mod:`robustellipse.lca`).

``derivatives`` and ``step`` are the readable reference implementation;
``solve`` runs the same arithmetic through a compiled loop
(:mod:`robustellipse._kernel`) because a fit takes a few hundred
thousand steps. The test suite pins both paths against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernel
from .conic import (
    PHI,
    THETA,
    GeometricEllipse,
    NotAnEllipse,
    DegenerateConic,
    algebraic_from_geometric,
    build_design,
    discriminant,
    geometric_from_algebraic,
)
from .lca import ThresholdConfig, threshold_slope, threshold_vector
from .validation import as_points

__all__ = [
    "SolverConfig",
    "NetworkState",
    "StateDerivatives",
    "FitReport",
    "LicqResult",
    "Diverged",
    "MaxItersExceeded",
    "init_state",
    "constraint_residuals",
    "derivatives",
    "step",
    "solve",
    "licq_check",
]

_ALPHA_GUARD = 1e6


class Diverged(RuntimeError):
    """The state left the admissible region (non-finite or unbounded)."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


class MaxItersExceeded(RuntimeError):
    """Iteration budget exhausted before convergence.

    Carries the best-so-far ``report`` (lowest peak constraint residual
    seen, ``converged=False``) and the matching ``state``.
    """

    def __init__(self, message: str, report: "FitReport", state: "NetworkState"):
        super().__init__(message)
        self.report = report
        self.state = state


@dataclass(frozen=True)
class SolverConfig:
    """Dynamics and stopping parameters.

    A run counts as converged once the unit-norm and discriminant
    residuals are at or below ``tol_residual`` and the coefficient
    motion ``mu * ||dalpha||_inf`` is at or below ``tol_state``.

    ``threshold=None`` means "derive from the norm passed to solve()";
    setting it explicitly overrides the norm preset.
    """

    c0: float = 5.0
    c1: float = 10.0
    c2: float = 10.0
    mu: float = 1e-4
    epsilon: float = -1e-12
    max_iters: int = 600_000
    tol_residual: float = 1e-6
    tol_state: float = 1e-9
    rng_seed: int = 0
    trace_every: int = 0
    threshold: ThresholdConfig | None = None

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")
        if not self.epsilon < 0:
            raise ValueError(f"epsilon must be negative, got {self.epsilon}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if not (self.tol_residual > 0 and self.tol_state > 0):
            raise ValueError("tolerances must be positive")
        if self.trace_every < 0:
            raise ValueError("trace_every must be nonnegative (0 disables tracing)")
        for name in ("c0", "c1", "c2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def resolved(self, norm: str | None = None) -> "SolverConfig":
        """Copy with a concrete threshold (norm preset fills a None)."""
        if self.threshold is not None:
            return self
        if norm is None:
            raise ValueError("no threshold set and no norm given")
        return replace(self, threshold=ThresholdConfig.for_norm(norm))


@dataclass
class NetworkState:
    """Full dynamic state of the network.

    ``z`` is derived (always ``threshold_vector(u, cfg.threshold)``);
    constructors and ``step`` keep it fresh.
    """

    u: np.ndarray
    z: np.ndarray
    alpha_tilde: np.ndarray
    zeta: np.ndarray
    beta: float
    gamma: float

    def copy(self) -> "NetworkState":
        return NetworkState(self.u.copy(), self.z.copy(), self.alpha_tilde.copy(),
                            self.zeta.copy(), self.beta, self.gamma)


@dataclass(frozen=True)
class StateDerivatives:
    du: np.ndarray
    dalpha: np.ndarray
    dzeta: np.ndarray
    dbeta: float
    dgamma: float


@dataclass(frozen=True)
class FitReport:
    """Outcome of one solve.

    Residuals are the constraint violations at the reported state:
    coupling ``||z - X'alpha||_inf``, unit-norm ``|alpha'PHI alpha - 1|``
    and discriminant ``|alpha'THETA alpha - eps|``. Reports returned by
    :func:`solve` satisfy: converged implies norm and discriminant
    residuals at or below tol_residual, settled coefficients and a
    negative conic discriminant. The coupling residual is diagnostic:
    points resting inside a threshold dead zone keep a coupling gap
    equal to their algebraic distance, which decays only on the (much
    slower) multiplier time scale, so it is reported, not gated.
    Reports attached to exceptions record whatever the failed run
    reached; ``ellipse`` may then be None.

    ``trace``, when enabled, is a float array of shape (K, 11) with
    columns (iteration, A..G, res_coupling, res_norm, res_disc).
    """

    ellipse: GeometricEllipse | None
    alpha_tilde: np.ndarray
    iterations: int
    residual_coupling: float
    residual_norm: float
    residual_disc: float
    converged: bool
    trace: np.ndarray | None = None


@dataclass(frozen=True)
class LicqResult:
    """Numerical rank of the active-constraint gradient matrix."""

    rank: int
    n_constraints: int
    independent: bool


def init_state(points, cfg: SolverConfig, rng=None) -> NetworkState:
    """Initial state: a random circle inscribed in the data's extent.

    The circle is centered at the bounding-box midpoint with radius
    drawn uniformly from [0.1, 1.0] x (diagonal / 10); its algebraic
    form seeds alpha, the slack entry is chosen so the discriminant
    constraint starts satisfied, u is set to the algebraic distances
    X'alpha, and the multipliers start at small uniform values.

    Draw order from *rng* (default: ``np.random.default_rng(cfg.rng_seed)``)
    is radius, zeta, beta, gamma.
    """
    if cfg.threshold is None:
        raise ValueError("cfg.threshold must be resolved before init_state")
    pts = as_points(points, min_points=5)
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)

    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    mid = (lo + hi) / 2.0
    diag = float(np.hypot(*(hi - lo)))
    scale = diag / 10.0 if diag > 0 else 1.0
    radius = float(rng.uniform(0.1, 1.0)) * scale

    alpha6 = algebraic_from_geometric(
        GeometricEllipse(float(mid[0]), float(mid[1]), radius, radius, 0.0)
    )
    slack = math.sqrt(max(cfg.epsilon - discriminant(alpha6), 0.0))
    alpha = np.append(alpha6, slack)

    design = build_design(pts)
    u = design.T @ alpha
    z = threshold_vector(u, cfg.threshold)
    n = pts.shape[0]
    zeta = rng.uniform(-0.01, 0.01, size=n)
    beta = float(rng.uniform(-0.01, 0.01))
    gamma = float(rng.uniform(-0.01, 0.01))
    return NetworkState(u=u, z=z, alpha_tilde=alpha, zeta=zeta, beta=beta, gamma=gamma)


def constraint_residuals(state: NetworkState, design: np.ndarray,
                         cfg: SolverConfig) -> tuple[float, float, float]:
    """(coupling, unit-norm, discriminant) residual magnitudes."""
    a = state.alpha_tilde
    coupling = float(np.max(np.abs(state.z - design.T @ a))) if state.u.size else 0.0
    norm = abs(float(a @ (PHI @ a)) - 1.0)
    disc = abs(float(a @ (THETA @ a)) - cfg.epsilon)
    return coupling, norm, disc


def derivatives(state: NetworkState, design: np.ndarray,
                cfg: SolverConfig) -> StateDerivatives:
    """Time derivatives of every state block at the current snapshot.

    Decision variables (u, alpha) descend the augmented Lagrangian,
    multipliers (zeta, beta, gamma) ascend it. For the identity
    threshold the penalty gradient is z itself rather than the
    surrogate u - z, so du loses its -u + z leak term.
    """
    if cfg.threshold is None:
        raise ValueError("cfg.threshold must be resolved before derivatives")
    u, z, a, zeta = state.u, state.z, state.alpha_tilde, state.zeta
    r = z - design.T @ a
    pa = PHI @ a
    ta = THETA @ a
    res_n = float(a @ pa) - 1.0
    res_d = float(a @ ta) - cfg.epsilon

    if cfg.threshold.identity:
        du = -z - zeta - cfg.c0 * r
    else:
        du = -u + z - zeta - cfg.c0 * r
    dalpha = (design @ zeta + cfg.c0 * (design @ r)
              - 2.0 * (state.beta + cfg.c1 * res_n) * pa
              - 2.0 * (state.gamma + cfg.c2 * res_d) * ta)
    return StateDerivatives(du=du, dalpha=dalpha, dzeta=r,
                            dbeta=res_n, dgamma=res_d)


def step(state: NetworkState, design: np.ndarray, cfg: SolverConfig) -> NetworkState:
    """One explicit Euler update; z is refreshed from the new u."""
    d = derivatives(state, design, cfg)
    mu = cfg.mu
    u = state.u + mu * d.du
    alpha = state.alpha_tilde + mu * d.dalpha
    zeta = state.zeta + mu * d.dzeta
    beta = state.beta + mu * d.dbeta
    gamma = state.gamma + mu * d.dgamma

    finite = (np.all(np.isfinite(u)) and np.all(np.isfinite(alpha))
              and np.all(np.isfinite(zeta)) and math.isfinite(beta)
              and math.isfinite(gamma))
    if not finite or np.max(np.abs(alpha)) > _ALPHA_GUARD:
        raise Diverged("state left the admissible region after one step")
    z = threshold_vector(u, cfg.threshold)
    return NetworkState(u=u, z=z, alpha_tilde=alpha, zeta=zeta,
                        beta=beta, gamma=gamma)


def _thr_kind(thr: ThresholdConfig) -> int:
    if thr.identity:
        return _kernel.THR_IDENTITY
    if math.isinf(thr.eta):
        return _kernel.THR_INF
    return _kernel.THR_FINITE


def solve(points, norm: str = "l1", cfg: SolverConfig | None = None,
          return_state: bool = False):
    """Fit an ellipse by integrating the network to convergence.

    Parameters
    ----------
    points : array-like (N, 2), N >= 5
    norm : {"l0", "l1", "l2"}
        Penalty on the algebraic distances. Ignored when
        ``cfg.threshold`` is set explicitly.
    cfg : SolverConfig, optional
    return_state : bool
        Also return the final NetworkState (for diagnostics such as
        :func:`licq_check`).

    Returns
    -------
    FitReport, or (FitReport, NetworkState) with ``return_state``.

    Raises
    ------
    Diverged, MaxItersExceeded, NotAnEllipse, DegenerateConic, TooFewPoints
    """
    cfg = (cfg or SolverConfig()).resolved(norm)
    thr = cfg.threshold
    pts = as_points(points, min_points=5)
    design = build_design(pts)
    state = init_state(pts, cfg)

    n = pts.shape[0]
    u = state.u.copy()
    alpha = state.alpha_tilde.copy()
    zeta = state.zeta.copy()
    design_t = np.ascontiguousarray(design.T)

    if cfg.trace_every > 0:
        cap = cfg.max_iters // cfg.trace_every + 3
    else:
        cap = 0
    trace_iter = np.empty(cap, dtype=np.int64)
    trace_alpha = np.empty((cap, 7))
    trace_res = np.empty((cap, 3))
    best_u = np.empty(n)
    best_alpha = np.empty(7)
    best_zeta = np.empty(n)

    (status, iters, beta, gamma, res_c, res_n, res_d,
     best_beta, best_gamma, best_rc, best_rn, best_rd,
     n_trace) = _kernel.run_dynamics(
        u, alpha, zeta, state.beta, state.gamma, design, design_t,
        cfg.c0, cfg.c1, cfg.c2, cfg.mu, cfg.epsilon,
        _thr_kind(thr), float(thr.eta), thr.delta, thr.lam,
        cfg.max_iters, cfg.tol_residual, cfg.tol_state,
        cfg.trace_every, trace_iter, trace_alpha, trace_res,
        best_u, best_alpha, best_zeta,
    )

    trace = None
    if cfg.trace_every > 0:
        trace = np.column_stack([trace_iter[:n_trace].astype(np.float64),
                                 trace_alpha[:n_trace], trace_res[:n_trace]])

    if status == _kernel.STATUS_DIVERGED:
        raise Diverged(f"dynamics diverged after {iters} iterations", iteration=iters)

    if status == _kernel.STATUS_MAX_ITERS:
        best_state = NetworkState(
            u=best_u, z=threshold_vector(best_u, thr), alpha_tilde=best_alpha,
            zeta=best_zeta, beta=best_beta, gamma=best_gamma,
        )
        try:
            ellipse = geometric_from_algebraic(best_alpha)
        except (NotAnEllipse, DegenerateConic):
            ellipse = None
        report = FitReport(
            ellipse=ellipse, alpha_tilde=best_alpha.copy(), iterations=iters,
            residual_coupling=best_rc, residual_norm=best_rn,
            residual_disc=best_rd, converged=False, trace=trace,
        )
        raise MaxItersExceeded(
            f"no convergence within {cfg.max_iters} iterations "
            f"(best residuals {best_rc:.3g}/{best_rn:.3g}/{best_rd:.3g})",
            report=report, state=best_state,
        )

    final = NetworkState(u=u, z=threshold_vector(u, thr), alpha_tilde=alpha,
                         zeta=zeta, beta=beta, gamma=gamma)
    if discriminant(alpha) >= 0.0:
        report = FitReport(
            ellipse=None, alpha_tilde=alpha.copy(), iterations=iters,
            residual_coupling=res_c, residual_norm=res_n, residual_disc=res_d,
            converged=True, trace=trace,
        )
        raise NotAnEllipse(
            f"converged to a non-elliptic conic (discriminant "
            f"{discriminant(alpha):.3g})", report=report,
        )
    report = FitReport(
        ellipse=geometric_from_algebraic(alpha), alpha_tilde=alpha.copy(),
        iterations=iters, residual_coupling=res_c, residual_norm=res_n,
        residual_disc=res_d, converged=True, trace=trace,
    )
    if return_state:
        return report, final
    return report


def licq_check(state: NetworkState, design: np.ndarray,
               cfg: SolverConfig) -> LicqResult:
    """Linear independence of the active-constraint gradients.

    Builds the (N+7) x (N+2) matrix whose columns are the gradients of
    the unit-norm constraint, the discriminant constraint and the N
    coupling constraints with respect to (alpha, u); the coupling
    columns carry the threshold slope g_i on their u-block. Independence
    (numerical rank N+2, relative singular-value cutoff 1e-8) is the
    regularity condition under which the converged point is a proper
    constrained stationary point.
    """
    if cfg.threshold is None:
        raise ValueError("cfg.threshold must be resolved before licq_check")
    a = state.alpha_tilde
    n = state.u.shape[0]
    m = np.zeros((n + 7, n + 2))
    m[:6, 0] = 2.0 * a[:6]
    m[0, 1] = -2.0 * a[2]
    m[1, 1] = a[1]
    m[2, 1] = -2.0 * a[0]
    m[6, 1] = 2.0 * a[6]
    m[:7, 2:] = -design
    g = threshold_slope(state.u, cfg.threshold)
    m[7:, 2:] = np.diag(np.atleast_1d(g))

    sv = np.linalg.svd(m, compute_uv=False)
    cutoff = 1e-8 * sv[0] if sv.size and sv[0] > 0 else 0.0
    rank = int(np.sum(sv > cutoff))
    return LicqResult(rank=rank, n_constraints=n + 2, independent=rank == n + 2)
