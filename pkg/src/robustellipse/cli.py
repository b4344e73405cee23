"""Command-line interface: fit, synth, bench, plot.

Exit codes for ``fit``: 0 converged, 2 iteration budget exhausted,
3 diverged or converged to a non-ellipse. Usage, I/O and parse errors
exit 1 (argparse's own usage errors exit 2, as usual). ``bench`` exits
nonzero only on I/O or config errors; statistical outcomes are data,
never a process failure.

All behavior is controlled by explicit flags; no environment variables
are consulted.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from . import fileio
from .conic import DegenerateConic, GeometricEllipse, NotAnEllipse
from .datagen import NoiseSpec, add_gaussian, add_pepper, corrupt_subset, sample_ellipse
from .datagen import Dataset
from .lca import ThresholdConfig
from .solver import Diverged, MaxItersExceeded, SolverConfig, solve
from .svgplot import write_svg
from .validation import TooFewPoints

__all__ = ["main", "build_parser"]

# Datasets the presets synthesize: the mid-sweep stress settings of the
# three benchmark grids, with the standard truth and jitter.
_SYNTH_PRESETS = {
    "exp1": ("laplacian", 0.8 * math.sqrt(2.0), 20),
    "exp2": ("uniform", 1.2, 20),
    "exp3": ("uniform", 1.5, 20),
}


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--norm", choices=("l0", "l1", "l2"), default="l1",
                   help="penalty on algebraic distances (default l1)")
    p.add_argument("--c0", type=float, default=5.0, help="coupling weight")
    p.add_argument("--c1", type=float, default=10.0, help="unit-norm weight")
    p.add_argument("--c2", type=float, default=10.0, help="discriminant weight")
    p.add_argument("--mu", type=float, default=1e-4, help="Euler step size")
    p.add_argument("--epsilon", type=float, default=-1e-12,
                   help="discriminant slack target (negative; pass as --epsilon=-1e-12)")
    p.add_argument("--eta", type=float, default=None,
                   help="threshold sharpness override (default: norm preset)")
    p.add_argument("--max-iters", type=int, default=600_000)
    p.add_argument("--tol", type=float, default=1e-6,
                   help="residual tolerance for convergence")
    p.add_argument("--tol-state", type=float, default=1e-9,
                   help="coefficient-motion tolerance for convergence")
    p.add_argument("--seed", type=int, default=0, help="initialization seed")


def _solver_config(args, trace_every: int = 0) -> SolverConfig:
    thr = None
    if args.eta is not None:
        thr = ThresholdConfig.for_norm(args.norm, eta=args.eta)
    return SolverConfig(
        c0=args.c0, c1=args.c1, c2=args.c2, mu=args.mu, epsilon=args.epsilon,
        max_iters=args.max_iters, tol_residual=args.tol,
        tol_state=args.tol_state, rng_seed=args.seed,
        trace_every=trace_every, threshold=thr,
    )


def _emit_fit_outputs(args, points, report) -> None:
    sys.stdout.write(fileio.dumps_json(fileio.report_to_dict(report)))
    if args.trace and report.trace is not None:
        fileio.write_trace_csv(args.trace, report.trace)
    if args.svg:
        truth = fileio.read_ellipse_json(args.truth) if args.truth else None
        fits = [(args.norm, report.ellipse)] if report.ellipse else []
        write_svg(args.svg, points, fits, truth)


def cmd_fit(args) -> int:
    points = fileio.read_points_csv(args.input)
    trace_every = args.trace_every if args.trace else 0
    cfg = _solver_config(args, trace_every=trace_every)
    try:
        report = solve(points, args.norm, cfg)
    except MaxItersExceeded as exc:
        print(f"warning: {exc}", file=sys.stderr)
        _emit_fit_outputs(args, points, exc.report)
        return 2
    except NotAnEllipse as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            _emit_fit_outputs(args, points, exc.report)
        return 3
    except (Diverged, DegenerateConic) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _emit_fit_outputs(args, points, report)
    return 0


def cmd_synth(args) -> int:
    if args.preset:
        kind, level, count = _SYNTH_PRESETS[args.preset]
        if args.kind is not None:
            kind = args.kind
        if args.level is not None:
            level = args.level
        if args.count is not None:
            count = args.count
    else:
        kind = args.kind if args.kind is not None else "laplacian"
        level = args.level if args.level is not None else 0.0
        count = args.count if args.count is not None else 0
    truth = GeometricEllipse(args.cx, args.cy, args.a, args.b,
                             math.radians(args.theta_deg))
    rng = np.random.default_rng(args.seed)
    pts = sample_ellipse(truth, args.n)
    pts = add_gaussian(pts, args.gauss_var, rng)

    spec = None
    if count > 0 and level > 0:
        spec = NoiseSpec(kind=kind, level=level, count=count, seed=args.seed,
                         convention=args.noise_scale_convention)
        ds = corrupt_subset(pts, spec, rng=rng, truth=truth)
    else:
        ds = Dataset(points=pts, truth=truth,
                     contaminated_indices=np.array([], dtype=np.intp),
                     seed=args.seed)
    if args.pepper > 0:
        bbox = _parse_bbox(args.bbox) if args.bbox else None
        peppered = add_pepper(ds.points, args.pepper, bbox=bbox, rng=rng,
                              seed=args.seed, truth=truth)
        merged = np.union1d(ds.contaminated_indices,
                            peppered.contaminated_indices).astype(np.intp)
        ds = Dataset(points=peppered.points, truth=truth,
                     contaminated_indices=merged, seed=args.seed)
    fileio.write_dataset(ds, args.out, spec=spec)
    return 0


def _parse_bbox(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        return float(w), float(h)
    except ValueError:
        raise ValueError(f"bbox must look like 640x480, got {text!r}") from None


def cmd_bench(args) -> int:
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            print(f"error: {args.config}:{exc.lineno}:{exc.colno}: {exc.msg}",
                  file=sys.stderr)
            return 1
        cfg = bench_mod.ExperimentConfig.from_dict(raw)
        if args.trials is not None:
            cfg = replace(cfg, trials_per_cell=args.trials)
        if args.seed is not None:
            cfg = replace(cfg, base_seed=args.seed)
    else:
        solver = SolverConfig(max_iters=args.max_iters)
        cfg = bench_mod.preset(args.preset, trials=args.trials,
                               base_seed=args.seed if args.seed is not None else 0,
                               solver=solver)
    if args.noise_scale_convention != "std":
        cfg = replace(cfg, noise_convention=args.noise_scale_convention)
    rows = bench_mod.run_experiment(cfg, jobs=args.jobs)
    fileio.write_mad_csv(args.out, rows)
    return 0


def cmd_plot(args) -> int:
    points = fileio.read_points_csv(args.input)
    fits = []
    for path in args.report or []:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        if not d.get("ellipse"):
            print(f"warning: {path} has no ellipse, skipping", file=sys.stderr)
            continue
        fits.append((Path(path).stem, fileio.ellipse_from_dict(d["ellipse"])))
    truth = fileio.read_ellipse_json(args.truth) if args.truth else None
    write_svg(args.svg, points, fits, truth)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustellipse",
        description="Robust ellipse fitting via constrained network dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit an ellipse to a point CSV")
    p_fit.add_argument("input", help="CSV with one x,y pair per line")
    _add_solver_flags(p_fit)
    p_fit.add_argument("--svg", default=None, help="write an overlay SVG here")
    p_fit.add_argument("--truth", default=None,
                       help="ellipse JSON drawn dashed in the SVG")
    p_fit.add_argument("--trace", default=None,
                       help="write a sampled iteration trace CSV here")
    p_fit.add_argument("--trace-every", type=int, default=1000,
                       help="trace sampling period (with --trace)")
    p_fit.set_defaults(func=cmd_fit)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--out", required=True, help="output CSV path")
    p_synth.add_argument("--preset", choices=sorted(_SYNTH_PRESETS), default=None,
                         help="benchmark dataset preset (mid-sweep stress level)")
    p_synth.add_argument("--cx", type=float, default=0.0)
    p_synth.add_argument("--cy", type=float, default=0.0)
    p_synth.add_argument("--a", type=float, default=2.0)
    p_synth.add_argument("--b", type=float, default=1.0)
    p_synth.add_argument("--theta-deg", type=float, default=30.0)
    p_synth.add_argument("--n", type=int, default=100, help="boundary points")
    p_synth.add_argument("--gauss-var", type=float, default=1e-8,
                         help="Gaussian jitter variance on every point")
    p_synth.add_argument("--kind", choices=("laplacian", "uniform"), default=None)
    p_synth.add_argument("--level", type=float, default=None,
                         help="outlier noise level (std by default)")
    p_synth.add_argument("--count", type=int, default=None,
                         help="number of contaminated points")
    p_synth.add_argument("--pepper", type=float, default=0.0,
                         help="spurious-point density over the bbox")
    p_synth.add_argument("--bbox", default=None, help="pepper region, e.g. 640x480")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--noise-scale-convention", choices=("std", "scale"),
                         default="std",
                         help="interpret --level as std (default) or natural scale")
    p_synth.set_defaults(func=cmd_synth)

    p_bench = sub.add_parser("bench", help="run a Monte-Carlo sweep")
    group = p_bench.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=bench_mod.PRESETS)
    group.add_argument("--config", help="experiment config JSON")
    p_bench.add_argument("--out", required=True, help="output CSV path")
    p_bench.add_argument("--trials", type=int, default=None,
                         help="override trials per cell")
    p_bench.add_argument("--jobs", type=int, default=1,
                         help="trial-level process parallelism")
    p_bench.add_argument("--seed", type=int, default=None, help="base seed")
    p_bench.add_argument("--max-iters", type=int, default=600_000,
                         help="solver iteration budget (presets only)")
    p_bench.add_argument("--noise-scale-convention", choices=("std", "scale"),
                         default="std")
    p_bench.set_defaults(func=cmd_bench)

    p_plot = sub.add_parser("plot", help="SVG overlay of points and fits")
    p_plot.add_argument("input", help="CSV with one x,y pair per line")
    p_plot.add_argument("--svg", required=True, help="output SVG path")
    p_plot.add_argument("--report", action="append", default=None,
                        help="FitReport JSON to overlay (repeatable)")
    p_plot.add_argument("--truth", default=None, help="ellipse JSON, drawn dashed")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooFewPoints as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
