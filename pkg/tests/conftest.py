"""Session fixtures.

The robustness sweep takes minutes, so it runs once per session and is
shared by the benchmark-invariant tests and the end-to-end suite (which
also reruns it to check determinism).
"""
from __future__ import annotations

import time

import pytest

from robustellipse import run_experiment, sample_ellipse
from robustellipse.fileio import mad_csv_lines

import helpers


@pytest.fixture(scope="session")
def truth():
    return helpers.TRUTH


@pytest.fixture(scope="session")
def clean100():
    return sample_ellipse(helpers.TRUTH, 100)


@pytest.fixture(scope="session")
def jittered100():
    return helpers.jittered_cloud()


@pytest.fixture(scope="session")
def robustness_sweep():
    """(rows, csv text, elapsed seconds) of the 30-trial contamination
    sweep. Expect this to take on the order of fifteen minutes."""
    cfg = helpers.robustness_sweep_config()
    start = time.monotonic()
    rows = run_experiment(cfg)
    elapsed = time.monotonic() - start
    return rows, mad_csv_lines(rows), elapsed
