"""Threshold functions for the sparse penalty terms.

The network never differentiates the penalty directly. Each residual has
an internal state u and an output z = T(u); the identity
``lambda * psi'(z) == u - z`` holds for the threshold T matched to the
penalty psi, so the non-smooth gradient term is replaced by ``u - z``
everywhere it appears.

The general threshold

    T(u) = sign(u) * (|u| - delta*lam) / (1 + exp(-eta * (|u| - lam)))

covers the whole family: eta=inf, delta=1 is the soft threshold (L1
penalty), large finite eta with delta=0 approximates the hard threshold
(L0 penalty), and an identity pass-through stands in for the smooth L2
case where no thresholding happens at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThresholdConfig",
    "soft_threshold",
    "general_threshold",
    "threshold_vector",
    "threshold_slope",
]

# exp() overflows past ~709.78; clamping the argument at +-700 leaves the
# result correct to well below 1e-300 absolute.
_EXP_CLAMP = 700.0


@dataclass(frozen=True)
class ThresholdConfig:
    """Parameters (eta, delta, lam) of the general threshold.

    ``eta`` is the sharpness of the sigmoid gate (``math.inf`` gives an
    exact dead zone), ``delta`` in [0, 1] the shrinkage fraction, ``lam``
    the threshold level. ``identity=True`` bypasses thresholding entirely
    (the L2 case); the other fields are then inert.
    """

    eta: float
    delta: float
    lam: float = 1.0
    identity: bool = False

    def __post_init__(self):
        if self.identity:
            return
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")

    @classmethod
    def l1(cls, lam: float = 1.0) -> "ThresholdConfig":
        """Soft threshold: exact dead zone, full shrinkage."""
        return cls(eta=math.inf, delta=1.0, lam=lam)

    @classmethod
    def l0(cls, eta: float = 10000.0, lam: float = 1.0) -> "ThresholdConfig":
        """Near-hard threshold: steep sigmoid gate, no shrinkage."""
        return cls(eta=eta, delta=0.0, lam=lam)

    @classmethod
    def l2(cls) -> "ThresholdConfig":
        """Identity pass-through (no thresholding)."""
        return cls(eta=math.inf, delta=0.0, lam=1.0, identity=True)

    @classmethod
    def for_norm(cls, norm: str, eta: float | None = None,
                 lam: float = 1.0) -> "ThresholdConfig":
        """Preset for a penalty name ("l0", "l1" or "l2")."""
        key = norm.lower()
        if key == "l0":
            return cls.l0(eta=eta if eta is not None else 10000.0, lam=lam)
        if key == "l1":
            if eta is not None:
                return cls(eta=eta, delta=1.0, lam=lam)
            return cls.l1(lam=lam)
        if key == "l2":
            return cls.l2()
        raise ValueError(f"unknown norm {norm!r}, expected 'l0', 'l1' or 'l2'")


def soft_threshold(u, lam: float = 1.0):
    """Classic soft threshold: shrink toward zero by lam, dead zone inside."""
    u = np.asarray(u, dtype=np.float64)
    out = np.sign(u) * np.maximum(np.abs(u) - lam, 0.0)
    return float(out) if out.ndim == 0 else out


def general_threshold(u, cfg: ThresholdConfig):
    """Apply the general threshold elementwise.

    Scalar in, float out; array in, array out.
    """
    u = np.asarray(u, dtype=np.float64)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if cfg.identity:
        out = u.copy()
    elif math.isinf(cfg.eta):
        out = np.where(
            np.abs(u) > cfg.lam,
            np.sign(u) * (np.abs(u) - cfg.delta * cfg.lam),
            0.0,
        )
    else:
        au = np.abs(u)
        arg = np.clip(-cfg.eta * (au - cfg.lam), -_EXP_CLAMP, _EXP_CLAMP)
        out = np.sign(u) * (au - cfg.delta * cfg.lam) / (1.0 + np.exp(arg))
    return float(out[0]) if scalar else out


def threshold_vector(u, cfg: ThresholdConfig) -> np.ndarray:
    """Vectorized threshold of a residual state vector (empty input allowed)."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.size == 0:
        return u.copy()
    return np.asarray(general_threshold(u, cfg))


def threshold_slope(u, cfg: ThresholdConfig):
    """Derivative dT/du of the general threshold, elementwise.

    For infinite eta the slope is exactly 0 inside the dead zone
    (|u| <= lam) and 1 outside. The identity case has slope 1 everywhere.
    """
    u = np.asarray(u, dtype=np.float64)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if cfg.identity:
        out = np.ones_like(u)
    elif math.isinf(cfg.eta):
        out = np.where(np.abs(u) > cfg.lam, 1.0, 0.0)
    else:
        au = np.abs(u)
        arg = np.clip(-cfg.eta * (au - cfg.lam), -_EXP_CLAMP, _EXP_CLAMP)
        e = np.exp(arg)
        sig = 1.0 / (1.0 + e)
        out = sig + cfg.eta * (au - cfg.delta * cfg.lam) * e * sig * sig
    return float(out[0]) if scalar else out
