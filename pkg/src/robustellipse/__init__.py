"""Robust ellipse fitting with sparse penalties via constrained network
dynamics, plus the data generators and benchmark harness around it."""

from .conic import (
    PHI,
    THETA,
    DegenerateConic,
    GeometricEllipse,
    NotAnEllipse,
    TooFewPoints,
    algebraic_distance,
    algebraic_distances,
    algebraic_from_geometric,
    angle_distance,
    build_design,
    discriminant,
    geometric_from_algebraic,
    lift_point,
)
from .lca import ThresholdConfig, general_threshold, soft_threshold, threshold_slope, threshold_vector
from .solver import (
    Diverged,
    FitReport,
    LicqResult,
    MaxItersExceeded,
    NetworkState,
    SolverConfig,
    derivatives,
    init_state,
    licq_check,
    solve,
    step,
)
from .datagen import CountTooLarge, Dataset, NoiseSpec, add_gaussian, add_pepper, corrupt_subset, sample_ellipse
from .bench import (
    BENCH_MAX_ITERS,
    ExperimentConfig,
    MadRow,
    preset,
    run_cell,
    run_experiment,
)
from .estimator import ConicFeatures, RobustEllipseFitter

__version__ = "0.1.0"

__all__ = [
    "PHI", "THETA", "GeometricEllipse", "NotAnEllipse", "DegenerateConic",
    "TooFewPoints", "algebraic_from_geometric", "geometric_from_algebraic",
    "lift_point", "build_design", "algebraic_distance", "algebraic_distances",
    "discriminant", "angle_distance",
    "ThresholdConfig", "soft_threshold", "general_threshold",
    "threshold_vector", "threshold_slope",
    "SolverConfig", "NetworkState", "FitReport", "LicqResult", "Diverged",
    "MaxItersExceeded", "init_state", "derivatives", "step", "solve",
    "licq_check",
    "NoiseSpec", "Dataset", "CountTooLarge", "sample_ellipse", "add_gaussian",
    "corrupt_subset", "add_pepper",
    "BENCH_MAX_ITERS", "ExperimentConfig", "MadRow", "preset", "run_cell",
    "run_experiment",
    "RobustEllipseFitter", "ConicFeatures",
    "__version__",
]
