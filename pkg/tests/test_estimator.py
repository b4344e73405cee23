"""Estimator wrappers: sklearn contract plus outlier flagging behavior."""
from __future__ import annotations

import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from robustellipse import (
    ConicFeatures,
    NoiseSpec,
    RobustEllipseFitter,
    TooFewPoints,
    algebraic_distances,
    corrupt_subset,
    lift_point,
    sample_ellipse,
)

import helpers


@pytest.fixture(scope="module")
def fitted(clean100_module):
    est = RobustEllipseFitter(norm="l0", max_iters=helpers.SETTLE_ITERS)
    return est.fit(clean100_module)


@pytest.fixture(scope="module")
def clean100_module():
    return sample_ellipse(helpers.TRUTH, 100)


# --- sklearn contract ---------------------------------------------------------

def test_get_params_round_trip():
    est = RobustEllipseFitter(norm="l1", lam=0.5, max_iters=1000)
    params = est.get_params()
    assert params["norm"] == "l1" and params["lam"] == 0.5
    twin = RobustEllipseFitter().set_params(**params)
    assert twin.get_params() == params


def test_clone_keeps_parameters_and_drops_state(fitted):
    fresh = clone(fitted)
    assert fresh.get_params() == fitted.get_params()
    assert not hasattr(fresh, "conic_")


def test_predict_before_fit_raises():
    with pytest.raises(NotFittedError):
        RobustEllipseFitter().predict([[0.0, 0.0]] * 5)


def test_fit_rejects_tiny_sample():
    with pytest.raises(TooFewPoints):
        RobustEllipseFitter().fit(np.zeros((4, 2)))


# --- fitting ------------------------------------------------------------------

def test_fit_recovers_parameters(fitted):
    assert fitted.converged_
    assert fitted.n_features_in_ == 2
    assert fitted.conic_.shape == (7,)
    assert fitted.n_iter_ == fitted.report_.iterations
    errs = helpers.param_errors(fitted.ellipse_, helpers.TRUTH)
    assert max(errs.values()) < 1e-3


def test_decision_function_matches_distances(fitted, clean100_module):
    got = fitted.decision_function(clean100_module)
    want = fitted.lam - np.abs(
        algebraic_distances(fitted.conic_, clean100_module))
    np.testing.assert_array_equal(got, want)
    np.testing.assert_array_equal(
        fitted.score_samples(clean100_module), want - fitted.lam)


def test_boundary_points_are_inliers(fitted, clean100_module):
    np.testing.assert_array_equal(
        fitted.predict(clean100_module), np.ones(100, dtype=int))


def test_flags_gross_outliers_without_false_alarms():
    clean = sample_ellipse(helpers.TRUTH, 60)
    spec = NoiseSpec(kind="laplacian", level=math.sqrt(2.0), count=12, seed=11)
    ds = corrupt_subset(clean, spec, truth=helpers.TRUTH)
    est = RobustEllipseFitter(norm="l0", max_iters=3_000_000).fit(ds.points)
    labels = est.predict(ds.points)

    contaminated = np.zeros(60, dtype=bool)
    contaminated[ds.contaminated_indices] = True
    # clean points must never be flagged; Laplacian displacements are
    # heavy-tailed but many stay inside the threshold level, so only
    # the far-flung subset of the corrupted points is detectable
    assert np.all(labels[~contaminated] == 1)
    assert np.sum(labels[contaminated] == -1) >= 3


# --- feature lift ---------------------------------------------------------------

def test_conic_features_match_the_lift():
    pts = np.array([[2.0, 3.0], [0.0, 0.0], [-1.0, 1.0], [0.5, -2.0], [4.0, 0.25]])
    trans = ConicFeatures()
    assert trans.fit(pts) is trans
    out = trans.transform(pts)
    assert out.shape == (5, 7)
    for row, (x, y) in zip(out, pts):
        np.testing.assert_array_equal(row, lift_point(x, y))


def test_conic_features_names_and_clone():
    trans = ConicFeatures().fit(np.zeros((5, 2)))
    assert list(trans.get_feature_names_out()) == [
        "x^2", "x*y", "y^2", "x", "y", "1", "slack"]
    fresh = clone(trans)
    with pytest.raises(NotFittedError):
        fresh.transform(np.zeros((2, 2)))


def test_conic_features_fit_transform_pipeline_shape(clean100_module):
    out = ConicFeatures().fit_transform(clean100_module)
    assert out.shape == (100, 7)
    np.testing.assert_array_equal(out[:, 6], np.zeros(100))
