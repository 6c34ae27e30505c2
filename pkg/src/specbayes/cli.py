"""Command-line interface: ``specbayes {simulate,estimate,benchmark,plot}``.

Every command computes all of its results before writing anything, so a
failing run leaves no partial output behind.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .benchmark import BENCHMARK_GAMMA, BenchmarkConfig, format_tables, run_benchmark, tables_to_csv
from .core import DEFAULT_GRID, Role, WavelengthGrid
from .dataio import (
    format_matrix_csv,
    format_observations_csv,
    format_spectrum_csv,
    load_dataset,
    load_prior_library,
    observations_sidecar,
    parse_spectrum_csv,
    read_observations,
)
from .errors import MethodScopeError, SpectralError
from .estimators import (
    DEFAULT_BETA,
    EstimationProblem,
    bayes_estimate,
    least_squares_estimate,
    rmse,
)
from .forward import NoiseModel, render_observations
from .jiang import jiang_estimate
from .plotting import merged_csv, svg_line_chart
from .priors import PrecisionSpec, daylight_prior, flat_prior, sensitivity_prior

DEFAULT_MANIFESTS = {
    Role.ILLUMINATION: "d65",
    Role.REFLECTANCE: "babelcolor",
    Role.SENSITIVITY: "nikon5100",
}


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(value) or value < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative number, got {text}")
    return value


def _positive(text: str) -> float:
    value = _non_negative(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def _add_grid(p: argparse.ArgumentParser, required_default: bool = True) -> None:
    default = (lambda v: v) if required_default else (lambda v: None)
    g = p.add_argument_group("wavelength grid")
    g.add_argument("--grid-start", type=float, default=default(DEFAULT_GRID.start_nm), metavar="NM")
    g.add_argument("--grid-step", type=_positive, default=default(DEFAULT_GRID.step_nm), metavar="NM")
    g.add_argument("--grid-count", type=int, default=default(DEFAULT_GRID.count), metavar="N")


def _grid(args) -> WavelengthGrid:
    return WavelengthGrid(args.grid_start, args.grid_step, args.grid_count)


def _add_manifests(p: argparse.ArgumentParser, defaults: bool) -> None:
    for role in Role:
        p.add_argument(f"--{role.value}", metavar="MANIFEST",
                       default=DEFAULT_MANIFESTS[role] if defaults else None,
                       help=f"{role.value} dataset manifest or bundled name"
                            + (f" (default: {DEFAULT_MANIFESTS[role]})" if defaults else ""))


def _add_prior(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("prior and likelihood")
    g.add_argument("--alpha", type=_positive, default=1.0,
                   help="weight of the identity part of the prior precision (default 1)")
    g.add_argument("--gamma", type=_non_negative, default=BENCHMARK_GAMMA,
                   help=f"weight of the curvature penalty in the prior precision (default {BENCHMARK_GAMMA:g})")
    g.add_argument("--beta", type=_positive, default=None,
                   help=f"likelihood precision; default 1/sigma^2, or {DEFAULT_BETA:g} for noiseless data")
    g.add_argument("--components", type=int, default=2, help="basis size for --method jiang (default 2)")
    g.add_argument("--held-out", action="append", default=None, metavar="CAMERA",
                   help="camera excluded from the sensitivity database (repeatable; default: Nikon 5100)")


def _write_all(outputs: dict[Path, str]) -> None:
    for path, text in outputs.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")


# -- simulate ------------------------------------------------------------------

def cmd_simulate(args) -> int:
    grid = _grid(args)
    normalize = not args.no_normalize_inputs
    E = load_dataset(args.illumination, grid, normalize=normalize)
    R = load_dataset(args.reflectance, grid)
    C = load_dataset(args.sensitivity, grid, normalize=normalize)
    noise = NoiseModel.gaussian(args.noise_sigma, args.seed)
    obs = render_observations(E, R, C, noise)
    out = Path(args.out)
    meta = observations_sidecar(
        obs, grid, noise, normalized_inputs=normalize,
        manifests={"illumination": args.illumination, "reflectance": args.reflectance,
                   "sensitivity": args.sensitivity},
    )
    _write_all({out: format_observations_csv(obs),
                out.with_suffix(".json"): json.dumps(meta, indent=2, sort_keys=True) + "\n"})
    print(f"wrote {obs.values.size} observations {obs.extents} to {out}")
    return 0


# -- estimate ------------------------------------------------------------------

def run_estimate(args):
    """Estimate plus optional RMSE; shared by the CLI and by tests."""
    obs, meta = read_observations(args.observations)
    grid = meta["grid"]
    if args.grid_start is not None:
        grid = WavelengthGrid(args.grid_start, args.grid_step or grid.step_nm,
                              args.grid_count or grid.count)
    normalize = meta.get("normalized_inputs", True)
    recorded = meta.get("manifests", {})
    target = Role.parse(args.target)
    known_roles = [r for r in Role if r is not target]
    families = []
    for role in known_roles:
        source = getattr(args, role.value) or recorded.get(role.value) or DEFAULT_MANIFESTS[role]
        families.append(load_dataset(source, grid,
                                     normalize=normalize and role is not Role.REFLECTANCE))
    beta = args.beta or meta["noise"].precision(DEFAULT_BETA)
    problem = EstimationProblem(target, args.index, families[0], families[1], obs, beta)

    held_out = tuple(args.held_out) if args.held_out is not None else ("Nikon 5100",)
    spec = PrecisionSpec(args.alpha, args.gamma)
    if args.method == "lsq":
        estimate = least_squares_estimate(problem)
    elif args.method == "jiang":
        if target is not Role.SENSITIVITY:
            raise MethodScopeError(
                f"--method jiang cannot estimate {target.value}: the basis-constrained "
                "baseline is only designed for camera sensitivity"
            )
        lib = load_prior_library(grid, held_out, args.components)
        estimate = jiang_estimate(problem, lib.sensitivity_means[args.index],
                                  lib.sensitivity_bases[args.index].components)
    else:
        prior_mean = args.prior_mean or {Role.ILLUMINATION: "daylight",
                                         Role.SENSITIVITY: "sensitivity-db"}.get(target, "flat")
        if prior_mean == "flat":
            prior = flat_prior(grid, spec)
        elif prior_mean == "daylight":
            if target is not Role.ILLUMINATION:
                raise SpectralError("--prior-mean daylight only applies to --target illumination")
            prior = daylight_prior(load_prior_library(grid, held_out, 0), spec)
        else:
            if target is not Role.SENSITIVITY:
                raise SpectralError("--prior-mean sensitivity-db only applies to --target sensitivity")
            prior = sensitivity_prior(load_prior_library(grid, held_out, 0), args.index, spec)
        estimate = bayes_estimate(problem, prior)

    score = None
    if args.ground_truth:
        truth_path = Path(args.ground_truth)
        if truth_path.suffix == ".csv":
            from .dataio import resample_to_grid

            truth = resample_to_grid(parse_spectrum_csv(truth_path, target), grid)
        else:
            truth = load_dataset(args.ground_truth, grid)[args.index]
        score = rmse(estimate.normalized, truth, normalized=not args.no_normalize_rmse)
    return estimate, score


def cmd_estimate(args) -> int:
    estimate, score = run_estimate(args)
    outputs = {Path(args.out): format_spectrum_csv(estimate.normalized)}
    if args.precision_out:
        if estimate.posterior is None:
            raise SpectralError("--precision-out needs --method bayes")
        outputs[Path(args.precision_out)] = format_matrix_csv(
            estimate.posterior.precision, estimate.normalized.wavelengths)
    _write_all(outputs)
    print(f"wrote {args.method} estimate of {args.target} #{args.index} to {args.out}")
    if score is not None:
        print(f"rmse={score!r}")
    return 0


# -- benchmark -----------------------------------------------------------------

def cmd_benchmark(args) -> int:
    config = BenchmarkConfig(
        grid=_grid(args), seeds=args.seeds, base_seed=args.base_seed,
        sigmas=tuple(args.noise_sigma), alpha=args.alpha, gamma=args.gamma, beta=args.beta,
        num_components=args.components,
        held_out=tuple(args.held_out) if args.held_out is not None else ("Nikon 5100",),
        normalize_rmse=not args.no_normalize_rmse,
    )
    tables = run_benchmark(config)
    text = format_tables(tables)
    outputs = {}
    if args.out_csv:
        outputs[Path(args.out_csv)] = tables_to_csv(tables)
    if args.out_txt:
        outputs[Path(args.out_txt)] = text
    _write_all(outputs)
    print(text, end="")
    return 0


# -- plot ----------------------------------------------------------------------

def cmd_plot(args) -> int:
    if args.labels and len(args.labels) != len(args.inputs):
        raise SpectralError(f"{len(args.labels)} labels given for {len(args.inputs)} inputs")
    spectra = [parse_spectrum_csv(p, args.role, bounded=False) for p in args.inputs]
    labels = args.labels or [Path(p).stem for p in args.inputs]
    outputs = {Path(args.out_svg): svg_line_chart(spectra, labels, title=args.title)}
    if args.out_csv:
        outputs[Path(args.out_csv)] = merged_csv(spectra, labels)
    _write_all(outputs)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specbayes",
        description="Estimate illumination, reflectance or camera sensitivity spectra from RGB pixel values.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="render pixel values from three datasets",
                       description="Render pixel values. Noisy values are not clipped to [0, 1].")
    _add_manifests(p, defaults=True)
    _add_grid(p)
    p.add_argument("--noise-sigma", type=_non_negative, default=0.0,
                   help="std of additive Gaussian pixel noise (default 0)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--no-normalize-inputs", action="store_true",
                   help="keep illuminant and sensitivities at their file scale instead of peak 1")
    p.add_argument("--out", required=True, help="observations CSV (a .json sidecar is written next to it)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate one spectrum from observations")
    p.add_argument("--observations", required=True)
    p.add_argument("--target", required=True, choices=[r.value for r in Role])
    p.add_argument("--index", type=int, default=0, help="member of the target family (default 0)")
    p.add_argument("--method", choices=["lsq", "bayes", "jiang"], default="bayes")
    p.add_argument("--prior-mean", choices=["flat", "daylight", "sensitivity-db"], default=None,
                   help="prior mean for --method bayes (default: daylight / sensitivity-db / flat by target)")
    _add_manifests(p, defaults=False)
    _add_grid(p, required_default=False)
    _add_prior(p)
    p.add_argument("--ground-truth", help="manifest (member --index) or spectrum CSV to score against")
    p.add_argument("--no-normalize-rmse", action="store_true",
                   help="score the estimate without max-normalizing the ground truth")
    p.add_argument("--out", required=True, help="estimated spectrum CSV")
    p.add_argument("--precision-out", help="posterior precision matrix CSV (bayes only)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("benchmark", help="RMSE tables over methods and target roles")
    _add_grid(p)
    _add_prior(p)
    p.add_argument("--seeds", type=int, default=20, help="noise realizations per noisy cell (default 20)")
    p.add_argument("--base-seed", type=_seed, default=0)
    p.add_argument("--noise-sigma", type=_non_negative, nargs="+", default=[0.0, 0.01])
    p.add_argument("--no-normalize-rmse", action="store_true")
    p.add_argument("--out-csv")
    p.add_argument("--out-txt")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("plot", help="SVG line chart of spectrum CSVs")
    p.add_argument("inputs", nargs="+", help="spectrum CSV files")
    p.add_argument("--labels", nargs="+")
    p.add_argument("--role", choices=[r.value for r in Role], default="illumination")
    p.add_argument("--title", default="")
    p.add_argument("--out-svg", required=True)
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpectralError as exc:
        print(f"specbayes {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
