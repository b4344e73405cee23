"""Synthetic data generation: exact grids, noise statistics, provenance."""
from __future__ import annotations

import math

import numpy as np
import pytest

from robustellipse import (
    CountTooLarge,
    Dataset,
    GeometricEllipse,
    NoiseSpec,
    add_gaussian,
    add_pepper,
    algebraic_distances,
    algebraic_from_geometric,
    corrupt_subset,
    sample_ellipse,
)

import helpers


# --- boundary sampling -------------------------------------------------------

def test_unit_circle_four_points_exact():
    pts = sample_ellipse(GeometricEllipse(0, 0, 1, 1, 0), 4)
    np.testing.assert_allclose(
        pts, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)


def test_single_point_is_parameter_zero():
    pts = sample_ellipse(helpers.TRUTH, 1)
    np.testing.assert_allclose(pts, helpers.TRUTH.boundary([0.0]), atol=0)
    assert pts.shape == (1, 2)


def test_samples_lie_on_the_conic():
    alpha = algebraic_from_geometric(helpers.TRUTH)
    pts = sample_ellipse(helpers.TRUTH, 100)
    assert pts.shape == (100, 2)
    assert np.max(np.abs(algebraic_distances(alpha, pts))) < 1e-12


def test_sample_count_validation():
    with pytest.raises(ValueError):
        sample_ellipse(helpers.TRUTH, 0)


def test_sampling_is_deterministic():
    a = sample_ellipse(helpers.TRUTH, 17)
    b = sample_ellipse(helpers.TRUTH, 17)
    np.testing.assert_array_equal(a, b)


# --- gaussian jitter ---------------------------------------------------------

def test_zero_variance_returns_untouched_copy(clean100):
    out = add_gaussian(clean100, 0.0, np.random.default_rng(0))
    np.testing.assert_array_equal(out, clean100)
    assert out is not clean100


def test_jitter_variance_matches_request():
    pts = np.zeros((100_000, 2))
    out = add_gaussian(pts, 1e-8, np.random.default_rng(0))
    measured = float(np.var(out))
    assert abs(measured - 1e-8) / 1e-8 < 0.05


def test_jitter_reproducible():
    a = add_gaussian(np.zeros((50, 2)), 1e-4, np.random.default_rng(7))
    b = add_gaussian(np.zeros((50, 2)), 1e-4, np.random.default_rng(7))
    np.testing.assert_array_equal(a, b)


def test_negative_variance_rejected(clean100):
    with pytest.raises(ValueError):
        add_gaussian(clean100, -1e-8, np.random.default_rng(0))


def test_jittered_points_stay_near_the_conic(jittered100):
    # 3-sigma of a 1e-8 jitter keeps the cloud within 1e-3 of the boundary
    alpha = algebraic_from_geometric(helpers.TRUTH)
    assert np.max(np.abs(algebraic_distances(alpha, jittered100))) < 1e-3


# --- noise settings ------------------------------------------------------------

@pytest.mark.parametrize("kw", [
    {"kind": "gaussian", "level": 1.0},
    {"kind": "laplacian", "level": -0.1},
    {"kind": "pepper", "level": 1.5},
    {"kind": "uniform", "level": 1.0, "count": -1},
    {"kind": "uniform", "level": 1.0, "convention": "sd"},
])
def test_noise_spec_validation(kw):
    with pytest.raises(ValueError):
        NoiseSpec(**kw)


def test_dataset_validates_indices(clean100):
    with pytest.raises(ValueError):
        Dataset(points=clean100, truth=None,
                contaminated_indices=np.array([0, 0]), seed=0)
    with pytest.raises(ValueError):
        Dataset(points=clean100, truth=None,
                contaminated_indices=np.array([100]), seed=0)


# --- subset corruption -------------------------------------------------------

def test_corrupt_subset_changes_exactly_the_listed_rows(clean100):
    spec = NoiseSpec(kind="laplacian", level=1.0, count=20, seed=3)
    ds = corrupt_subset(clean100, spec, truth=helpers.TRUTH)
    assert isinstance(ds, Dataset)
    assert ds.truth == helpers.TRUTH and ds.seed == 3
    assert ds.contaminated_indices.shape == (20,)
    assert np.all(np.diff(ds.contaminated_indices) > 0)
    mask = np.zeros(100, dtype=bool)
    mask[ds.contaminated_indices] = True
    untouched = ~mask
    np.testing.assert_array_equal(ds.points[untouched], clean100[untouched])
    moved = np.any(ds.points[mask] != clean100[mask], axis=1)
    assert moved.all()


def test_corrupt_subset_zero_level_keeps_values(clean100):
    spec = NoiseSpec(kind="uniform", level=0.0, count=10, seed=1)
    ds = corrupt_subset(clean100, spec)
    np.testing.assert_array_equal(ds.points, clean100)
    assert ds.contaminated_indices.shape == (10,)


def test_corrupt_subset_count_guard(clean100):
    with pytest.raises(CountTooLarge):
        corrupt_subset(clean100, NoiseSpec(kind="uniform", level=1.0, count=101))


def test_corrupt_subset_rejects_pepper_kind(clean100):
    with pytest.raises(ValueError):
        corrupt_subset(clean100, NoiseSpec(kind="pepper", level=0.5))


def test_corrupt_subset_reproducible(clean100):
    spec = NoiseSpec(kind="laplacian", level=1.0, count=30, seed=9)
    a = corrupt_subset(clean100, spec)
    b = corrupt_subset(clean100, spec)
    np.testing.assert_array_equal(a.points, b.points)
    np.testing.assert_array_equal(a.contaminated_indices, b.contaminated_indices)


def test_laplacian_level_is_a_standard_deviation():
    level = math.sqrt(2.0)
    n = 500_000
    spec = NoiseSpec(kind="laplacian", level=level, count=n, seed=1)
    ds = corrupt_subset(np.zeros((n, 2)), spec)
    measured = float(np.std(ds.points))
    assert abs(measured - level) / level < 0.01


def test_uniform_level_sets_the_support():
    # std convention: half-width is level * sqrt(3)
    level = 2.4
    bound = level * math.sqrt(3.0)
    n = 500_000
    spec = NoiseSpec(kind="uniform", level=level, count=n, seed=2)
    ds = corrupt_subset(np.zeros((n, 2)), spec)
    peak = float(np.max(np.abs(ds.points)))
    assert peak <= bound
    assert peak > 0.99 * bound


def test_scale_convention_passes_the_parameter_through():
    n = 200_000
    spec = NoiseSpec(kind="laplacian", level=1.0, count=n, seed=4,
                     convention="scale")
    ds = corrupt_subset(np.zeros((n, 2)), spec)
    # a unit Laplacian scale gives standard deviation sqrt(2)
    measured = float(np.std(ds.points))
    assert abs(measured - math.sqrt(2.0)) / math.sqrt(2.0) < 0.01


# --- pepper ------------------------------------------------------------------

def test_pepper_density_zero_appends_nothing(clean100):
    ds = add_pepper(clean100, 0.0, bbox=(640, 480))
    np.testing.assert_array_equal(ds.points, clean100)
    assert ds.contaminated_indices.size == 0


def test_pepper_count_follows_density_times_area(clean100):
    ds = add_pepper(clean100, 0.001, bbox=(640, 480), seed=0)
    assert len(ds.points) == 100 + 307
    np.testing.assert_array_equal(ds.contaminated_indices, np.arange(100, 407))
    extra = ds.points[100:]
    assert np.all(extra[:, 0] >= 0) and np.all(extra[:, 0] <= 640)
    assert np.all(extra[:, 1] >= 0) and np.all(extra[:, 1] <= 480)


def test_pepper_defaults_to_data_bounding_box(clean100):
    ds = add_pepper(clean100, 0.5, seed=1)
    lo, hi = clean100.min(axis=0), clean100.max(axis=0)
    w, h = hi - lo
    assert len(ds.points) == 100 + int(0.5 * w * h)
    extra = ds.points[100:]
    assert np.all(extra >= lo) and np.all(extra <= hi)


def test_pepper_density_validation(clean100):
    with pytest.raises(ValueError):
        add_pepper(clean100, -0.1)
    with pytest.raises(ValueError):
        add_pepper(clean100, 1.1)
