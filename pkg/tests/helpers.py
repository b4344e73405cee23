"""Shared constants and oracle builders for the test suite.

Anything more than one test module leans on lives here: the standard
truth ellipse, the finite-difference oracle for the network derivatives,
a hand-built equilibrium state, and the benchmark configurations that
the end-to-end tests pin down.
"""
from __future__ import annotations

import math

import numpy as np

from robustellipse import (
    BENCH_MAX_ITERS,
    ExperimentConfig,
    GeometricEllipse,
    SolverConfig,
    add_gaussian,
    algebraic_from_geometric,
    angle_distance,
    build_design,
    derivatives,
    discriminant,
    sample_ellipse,
    threshold_vector,
)
from robustellipse.conic import PHI, THETA
from robustellipse.solver import NetworkState

#: The benchmark truth used throughout: center at the origin, semi-axes
#: 2 and 1, rotated 30 degrees.
TRUTH = GeometricEllipse(0.0, 0.0, 2.0, 1.0, math.radians(30.0))

#: Iteration budget that lets every clean fit of TRUTH settle. Measured
#: settling takes ~0.9M steps at the default step size; 2M is 2x headroom.
SETTLE_ITERS = 2_000_000


def rel_inf(got, want, floor: float = 1e-8) -> float:
    """Worst elementwise relative deviation, floored so that near-zero
    pairs compare absolutely at the floor scale."""
    got = np.atleast_1d(np.asarray(got, dtype=np.float64))
    want = np.atleast_1d(np.asarray(want, dtype=np.float64))
    scale = np.maximum.reduce(
        [np.abs(got), np.abs(want), np.full(got.shape, floor)]
    )
    return float(np.max(np.abs(got - want) / scale))


def param_errors(fit: GeometricEllipse, truth: GeometricEllipse) -> dict:
    """Absolute error of each of the five parameters (angle wrapped)."""
    return {
        "cx": abs(fit.cx - truth.cx),
        "cy": abs(fit.cy - truth.cy),
        "a": abs(fit.a - truth.a),
        "b": abs(fit.b - truth.b),
        "theta": angle_distance(fit.theta, truth.theta),
    }


def equilibrium_state(e: GeometricEllipse, n: int, cfg: SolverConfig):
    """Exact stationary point of the dynamics on noise-free data.

    With points on the conic, the true coefficients (plus the slack that
    balances the discriminant constraint), u = zeta = 0 and zero scalar
    multipliers, every derivative block vanishes up to roundoff.
    Returns (state, design, points).
    """
    pts = sample_ellipse(e, n)
    design = build_design(pts)
    alpha6 = algebraic_from_geometric(e)
    slack = math.sqrt(max(cfg.epsilon - discriminant(alpha6), 0.0))
    alpha = np.append(alpha6, slack)
    zeros = np.zeros(n)
    state = NetworkState(
        u=zeros.copy(),
        z=threshold_vector(zeros, cfg.threshold),
        alpha_tilde=alpha,
        zeta=zeros.copy(),
        beta=0.0,
        gamma=0.0,
    )
    return state, design, pts


def smooth_lagrangian(design: np.ndarray, cfg: SolverConfig):
    """The augmented Lagrangian without the penalty term, as a callable
    of (z, alpha, zeta, beta, gamma). The penalty's gradient surrogate is
    checked separately, so the oracle differentiates only this part."""

    def lagrangian(z, alpha, zeta, beta, gamma) -> float:
        r = z - design.T @ alpha
        rn = float(alpha @ (PHI @ alpha)) - 1.0
        rd = float(alpha @ (THETA @ alpha)) - cfg.epsilon
        return (
            float(zeta @ r)
            + beta * rn
            + gamma * rd
            + 0.5 * cfg.c0 * float(r @ r)
            + 0.5 * cfg.c1 * rn * rn
            + 0.5 * cfg.c2 * rd * rd
        )

    return lagrangian


def _central(f, x: np.ndarray, h: float) -> np.ndarray:
    grad = np.zeros_like(x)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (f(xp) - f(xm)) / (2.0 * h)
    return grad


def derivative_oracle_worst(design: np.ndarray, cfg: SolverConfig,
                            rng: np.random.Generator, n_states: int,
                            h: float = 1e-6) -> float:
    """Worst relative error of the derivative blocks against central
    finite differences over random states.

    du carries the penalty surrogate u - z, which is not the gradient
    of anything differentiable; it gets subtracted analytically and the
    remainder is checked against the z-gradient of the smooth part.
    """
    n = design.shape[1]
    lagr = smooth_lagrangian(design, cfg)
    worst = 0.0
    for _ in range(n_states):
        u = rng.uniform(-3.0, 3.0, n)
        alpha = rng.uniform(-1.0, 1.0, 7)
        zeta = rng.uniform(-1.0, 1.0, n)
        beta = float(rng.uniform(-1.0, 1.0))
        gamma = float(rng.uniform(-1.0, 1.0))
        z = threshold_vector(u, cfg.threshold)
        state = NetworkState(u=u, z=z, alpha_tilde=alpha, zeta=zeta,
                             beta=beta, gamma=gamma)
        d = derivatives(state, design, cfg)

        fd_alpha = _central(lambda a: lagr(z, a, zeta, beta, gamma), alpha, h)
        fd_zeta = _central(lambda zz: lagr(z, alpha, zz, beta, gamma), zeta, h)
        fd_beta = (lagr(z, alpha, zeta, beta + h, gamma)
                   - lagr(z, alpha, zeta, beta - h, gamma)) / (2.0 * h)
        fd_gamma = (lagr(z, alpha, zeta, beta, gamma + h)
                    - lagr(z, alpha, zeta, beta, gamma - h)) / (2.0 * h)
        fd_z = _central(lambda zz: lagr(zz, alpha, zeta, beta, gamma), z, h)
        du_expected = -(u - z) - fd_z

        worst = max(
            worst,
            rel_inf(d.dalpha, -fd_alpha),
            rel_inf(d.dzeta, fd_zeta),
            rel_inf(d.dbeta, fd_beta),
            rel_inf(d.dgamma, fd_gamma),
            rel_inf(d.du, du_expected),
        )
    return worst


def robustness_sweep_config() -> ExperimentConfig:
    """The laplacian-contamination sweep the end-to-end ordering test
    runs: 30 trials per cell at the three highest stress levels."""
    root2 = math.sqrt(2.0)
    return ExperimentConfig(
        truth=TRUTH,
        sweep_kind="laplacian_level",
        sweep_values=(0.7 * root2, 0.9 * root2, root2),
        n_points=100,
        trials_per_cell=30,
        outlier_count=20,
        estimators=("l0", "l1", "l2"),
        solver=SolverConfig(max_iters=BENCH_MAX_ITERS),
        base_seed=0,
    )


def outlier_count_sweep_config() -> ExperimentConfig:
    """Uniform-noise sweep over contamination counts; only the two
    estimators the trend assertion compares are run."""
    return ExperimentConfig(
        truth=TRUTH,
        sweep_kind="outlier_count",
        sweep_values=(0, 10, 20, 40),
        n_points=100,
        trials_per_cell=20,
        noise_level=1.5,
        estimators=("l0", "l2"),
        solver=SolverConfig(max_iters=BENCH_MAX_ITERS),
        base_seed=0,
    )


def mad_by(rows, cell, estimator):
    """The single MadRow matching (cell, estimator)."""
    hits = [r for r in rows if r.estimator == estimator
            and math.isclose(r.cell, cell, rel_tol=0, abs_tol=1e-12)]
    assert len(hits) == 1, f"expected one row for ({cell}, {estimator})"
    return hits[0]


def jittered_cloud(n: int = 100, variance: float = 1e-8, seed: int = 5) -> np.ndarray:
    """TRUTH boundary samples with small Gaussian jitter."""
    rng = np.random.default_rng(seed)
    return add_gaussian(sample_ellipse(TRUTH, n), variance, rng)
