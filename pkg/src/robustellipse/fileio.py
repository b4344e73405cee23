"""File formats: point-set CSV, ellipse/report JSON, benchmark CSV.

Floats are written with ``repr`` (shortest round-trip form) and JSON
with sorted keys, so identical inputs always serialize to identical
bytes; the determinism guarantees lean on this.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bench import MadRow
from .conic import GeometricEllipse
from .datagen import Dataset, NoiseSpec
from .solver import FitReport

__all__ = [
    "PointsCsvError",
    "read_points_csv",
    "write_points_csv",
    "ellipse_to_dict",
    "ellipse_from_dict",
    "read_ellipse_json",
    "write_ellipse_json",
    "report_to_dict",
    "dumps_json",
    "write_trace_csv",
    "write_mad_csv",
    "mad_csv_lines",
    "write_dataset",
    "read_sidecar",
]

MAD_CSV_HEADER = "cell,estimator,mad_a,mad_b,mad_cx,mad_cy,mad_theta_deg,failures,trials"
TRACE_CSV_HEADER = "iteration,A,B,C,D,E,F,G,res_coupling,res_norm,res_disc"


class PointsCsvError(ValueError):
    """Malformed point-set CSV; carries the offending line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


def _fmt(x: float) -> str:
    return repr(float(x))


def read_points_csv(path) -> np.ndarray:
    """Read one x,y pair per line; an optional leading 'x,y' header is
    skipped. Blank lines are ignored."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if line_no == 1 and text.replace(" ", "").lower() == "x,y":
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise PointsCsvError(path, line_no,
                                     f"expected 2 comma-separated values, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise PointsCsvError(path, line_no,
                                     f"could not parse {text!r} as two numbers") from None
    return np.array(rows, dtype=np.float64).reshape(-1, 2)


def write_points_csv(path, points, header: bool = True) -> None:
    pts = np.asarray(points, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write("x,y\n")
        for x, y in pts:
            fh.write(f"{_fmt(x)},{_fmt(y)}\n")


def ellipse_to_dict(e: GeometricEllipse) -> dict:
    return {"cx": e.cx, "cy": e.cy, "a": e.a, "b": e.b, "theta_rad": e.theta}


def ellipse_from_dict(d: dict) -> GeometricEllipse:
    try:
        return GeometricEllipse(float(d["cx"]), float(d["cy"]),
                                float(d["a"]), float(d["b"]),
                                float(d["theta_rad"]))
    except KeyError as exc:
        raise ValueError(f"ellipse record is missing key {exc}") from exc


def read_ellipse_json(path) -> GeometricEllipse:
    with open(path, "r", encoding="utf-8") as fh:
        return ellipse_from_dict(json.load(fh))


def write_ellipse_json(path, e: GeometricEllipse) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(ellipse_to_dict(e)))


def report_to_dict(report: FitReport) -> dict:
    return {
        "ellipse": ellipse_to_dict(report.ellipse) if report.ellipse else None,
        "alpha_tilde": [float(v) for v in report.alpha_tilde],
        "iterations": int(report.iterations),
        "residuals": {
            "coupling": float(report.residual_coupling),
            "norm": float(report.residual_norm),
            "discriminant": float(report.residual_disc),
        },
        "converged": bool(report.converged),
    }


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_trace_csv(path, trace: np.ndarray) -> None:
    """Trace row layout matches FitReport.trace: iteration, A..G, residuals."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TRACE_CSV_HEADER + "\n")
        for row in np.atleast_2d(trace):
            cells = [str(int(row[0]))] + [_fmt(v) for v in row[1:]]
            fh.write(",".join(cells) + "\n")


def _mad_row_line(row: MadRow) -> str:
    return ",".join([
        _fmt(row.cell) if isinstance(row.cell, float) else str(row.cell),
        row.estimator,
        _fmt(row.mad_a), _fmt(row.mad_b), _fmt(row.mad_cx), _fmt(row.mad_cy),
        _fmt(math.degrees(row.mad_theta)),
        str(row.failures), str(row.trials),
    ])


def mad_csv_lines(rows) -> str:
    return "\n".join([MAD_CSV_HEADER] + [_mad_row_line(r) for r in rows]) + "\n"


def write_mad_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(mad_csv_lines(rows))


def write_dataset(ds: Dataset, csv_path, spec: NoiseSpec | None = None) -> Path:
    """Write points CSV plus a JSON sidecar (same stem, .json suffix).

    Returns the sidecar path.
    """
    csv_path = Path(csv_path)
    write_points_csv(csv_path, ds.points)
    sidecar = {
        "truth": ellipse_to_dict(ds.truth) if ds.truth else None,
        "contaminated_indices": [int(i) for i in ds.contaminated_indices],
        "seed": int(ds.seed),
        "spec": None if spec is None else {
            "kind": spec.kind, "level": spec.level, "count": spec.count,
            "convention": spec.convention,
        },
    }
    sidecar_path = csv_path.with_suffix(".json")
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        fh.write(dumps_json(sidecar))
    return sidecar_path


def read_sidecar(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
