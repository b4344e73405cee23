"""Synthetic datasets: boundary samples, jitter, and outlier injection.

The standard pipeline is sample_ellipse -> add_gaussian (small jitter on
every point) -> corrupt_subset (heavy-tailed noise on a random subset),
optionally followed by add_pepper (spurious uniform points). All
randomness flows through an explicit rng or a seed recorded in the
resulting Dataset, so datasets are reproducible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conic import GeometricEllipse
from .validation import as_points

__all__ = [
    "NoiseSpec",
    "Dataset",
    "CountTooLarge",
    "sample_ellipse",
    "add_gaussian",
    "corrupt_subset",
    "add_pepper",
]


class CountTooLarge(ValueError):
    """More points requested for contamination than the set contains."""


_KINDS = ("laplacian", "uniform", "pepper")


@dataclass(frozen=True)
class NoiseSpec:
    """What to corrupt and how strongly.

    ``level`` is the standard deviation per coordinate for laplacian and
    uniform kinds under the default "std" convention; with
    ``convention="scale"`` it is instead the distribution's natural
    parameter (Laplacian scale b, uniform half-width). For pepper noise,
    ``level`` is the density and ``count`` is ignored.
    """

    kind: str
    level: float
    count: int = 0
    seed: int = 0
    convention: str = "std"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.level < 0:
            raise ValueError(f"level must be nonnegative, got {self.level}")
        if self.kind == "pepper" and not 0.0 <= self.level <= 1.0:
            raise ValueError(f"pepper density must lie in [0, 1], got {self.level}")
        if self.count < 0:
            raise ValueError(f"count must be nonnegative, got {self.count}")
        if self.convention not in ("std", "scale"):
            raise ValueError(
                f"convention must be 'std' or 'scale', got {self.convention!r}")


@dataclass(frozen=True)
class Dataset:
    """Point set plus provenance: the truth (when known), which rows were
    corrupted or appended, and the seed that produced them."""

    points: np.ndarray
    truth: GeometricEllipse | None
    contaminated_indices: np.ndarray
    seed: int

    def __post_init__(self):
        idx = np.asarray(self.contaminated_indices, dtype=np.intp)
        object.__setattr__(self, "contaminated_indices", idx)
        if idx.size and (len(np.unique(idx)) != idx.size
                         or idx.min() < 0 or idx.max() >= len(self.points)):
            raise ValueError("contaminated_indices must be distinct and in range")


def sample_ellipse(e: GeometricEllipse, n: int) -> np.ndarray:
    """*n* boundary points at a uniform parameter grid t_i = 2*pi*i/n."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    t = 2.0 * math.pi * np.arange(n) / n
    return e.boundary(t)


def add_gaussian(points, variance: float, rng) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian jitter per coordinate."""
    pts = as_points(points)
    if variance < 0:
        raise ValueError(f"variance must be nonnegative, got {variance}")
    if variance == 0:
        return pts.copy()
    return pts + rng.normal(0.0, math.sqrt(variance), size=pts.shape)


def _noise_param(spec: NoiseSpec) -> float:
    # Laplacian std = b*sqrt(2); uniform std = w/sqrt(3). The "std"
    # convention makes `level` the std; "scale" passes it straight through.
    if spec.convention == "scale":
        return spec.level
    if spec.kind == "laplacian":
        return spec.level / math.sqrt(2.0)
    return spec.level * math.sqrt(3.0)


def corrupt_subset(points, spec: NoiseSpec, rng=None,
                   truth: GeometricEllipse | None = None) -> Dataset:
    """Add heavy-tailed noise to ``spec.count`` randomly chosen points.

    Both coordinates of each chosen point are shifted by independent
    draws. The remaining points pass through bitwise untouched.
    """
    if spec.kind not in ("laplacian", "uniform"):
        raise ValueError(f"corrupt_subset expects laplacian or uniform, got {spec.kind!r}")
    pts = as_points(points).copy()
    n = pts.shape[0]
    if spec.count > n:
        raise CountTooLarge(f"cannot corrupt {spec.count} of {n} points")
    if rng is None:
        rng = np.random.default_rng(spec.seed)

    idx = np.sort(rng.choice(n, size=spec.count, replace=False))
    param = _noise_param(spec)
    if spec.count and param > 0:
        if spec.kind == "laplacian":
            noise = rng.laplace(0.0, param, size=(spec.count, 2))
        else:
            noise = rng.uniform(-param, param, size=(spec.count, 2))
        pts[idx] += noise
    return Dataset(points=pts, truth=truth, contaminated_indices=idx, seed=spec.seed)


def add_pepper(points, density: float, bbox=None, rng=None, seed: int = 0,
               truth: GeometricEllipse | None = None) -> Dataset:
    """Append floor(density * W * H) spurious uniform points.

    ``bbox=(W, H)`` describes a source image, so the points land in
    [0, W] x [0, H]; with ``bbox=None`` the data's own bounding box is
    used for both the area and the region.
    """
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    pts = as_points(points)
    if rng is None:
        rng = np.random.default_rng(seed)

    if bbox is None:
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        w, h = float(hi[0] - lo[0]), float(hi[1] - lo[1])
        x0, y0 = float(lo[0]), float(lo[1])
    else:
        w, h = float(bbox[0]), float(bbox[1])
        x0, y0 = 0.0, 0.0
        if w < 0 or h < 0:
            raise ValueError(f"bbox dimensions must be nonnegative, got {bbox}")

    k = int(density * w * h)
    extra = np.column_stack([rng.uniform(x0, x0 + w, size=k),
                             rng.uniform(y0, y0 + h, size=k)])
    out = np.vstack([pts, extra])
    idx = np.arange(len(pts), len(out), dtype=np.intp)
    return Dataset(points=out, truth=truth, contaminated_indices=idx, seed=seed)
