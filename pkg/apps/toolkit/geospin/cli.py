"""geospin command-line frontend.

Exit codes: 0 on success, 1 on a computational failure (domain exit,
non-convergence, failed verification), 2 on a usage error.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from geospin.api.schemas import (
    FlowMode,
    ManifoldSummary,
    OutputFormat,
    RunConfig,
    SweepOutput,
)
from geospin.core.config import settings
from geospin.core.errors import GeometryError
from geospin.dynamics.geodesic import GeodesicState, integrate_geodesic, logdet_rate_residual
from geospin.expr import evaluate, parse_expr
from geospin.geometry.connection import christoffel_at
from geospin.geometry.geospin import geospin_matrix
from geospin.geometry.manifest import load_manifest
from geospin.geometry.manifold import MetricField
from geospin.geometry.ricci_flow import corollary_check, ricci_flow_integrate
from geospin.geometry.zoo import ZOO, builtin_manifold, list_manifolds, normalize_name
from geospin.output import (
    christoffel_csv,
    christoffel_output,
    emit,
    geospin_csv,
    geospin_output,
    manifolds_csv,
    model_json,
    ricci_flow_csv,
    ricci_flow_output,
    spectrum_csv,
    spectrum_output,
    sweep_csv,
    trajectory_csv,
    trajectory_output,
    verification_csv,
    write_plot_data,
)
from geospin.spectrum.hamiltonian import geometric_spectrum
from geospin.sweep import run_sweep
from geospin.verification import GROUPS, run_verify, summarize

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flag values that argparse itself cannot catch."""


def parse_reals(text: str) -> list[float]:
    """Comma-separated reals: "0,1", "1e-3,-2.5", "pi/2,0"."""
    values = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            raise UsageError(f"empty component in '{text}'")
        try:
            values.append(float(piece))
        except ValueError:
            try:
                values.append(evaluate(parse_expr(piece, []), []))
            except GeometryError as exc:
                raise UsageError(f"'{piece}' is not a real number: {exc}") from None
    return values


def _param_value(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_params(pairs: Sequence[str], dim: Optional[int]) -> dict[str, Any]:
    """--param name=value pairs; --dim is shorthand for n=<dim>."""
    params: dict[str, Any] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects name=value, got '{pair}'")
        params[name.strip()] = _param_value(value.strip())
    if dim is not None:
        params["n"] = dim
    return params


def check_dim_flag(manifold: Optional[str], manifest: Optional[Path], dim: Optional[int]) -> None:
    """--dim only applies to zoo manifolds with an `n` parameter; unknown names are left to the zoo lookup."""
    if dim is None:
        return
    if manifest is not None:
        raise UsageError("--dim does not apply to --manifest; the manifest fixes the dimension")
    entry = ZOO.get(normalize_name(manifold))
    if entry is not None and "n" not in entry.parameters:
        raise UsageError(f"--dim does not apply to '{entry.name}', which has a fixed dimension")


def _add_manifold_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--manifold", help="Built-in manifold name (see list-manifolds)")
    source.add_argument("--manifest", type=Path, help="JSON manifold manifest")
    parser.add_argument("--dim", type=int, help="Dimension for euclidean / flat_torus")
    parser.add_argument("--param", action="append", default=[], metavar="NAME=VALUE", help="Zoo parameter")
    parser.add_argument("--point", required=True, help="Chart point, comma-separated")


def _add_output_args(parser: argparse.ArgumentParser, default_format: OutputFormat) -> None:
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=[f.value for f in OutputFormat],
        default=default_format.value,
        help=f"Output format (default: {default_format.value})",
    )
    parser.add_argument("--output", type=Path, help="Write the primary artifact here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geospin", description="Geospin matrix and geometric Hamiltonian toolkit")
    parser.add_argument("--log-level", default=settings.log_level, help="stderr log level")
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command")

    christoffel = subparsers.add_parser("christoffel", help="Christoffel symbols and ∂ ln√g at a point")
    _add_manifold_args(christoffel)
    _add_output_args(christoffel, OutputFormat.JSON)

    geospin = subparsers.add_parser("geospin", help="Geospin matrix W = Γ·v and its diagonal/off-diagonal split")
    _add_manifold_args(geospin)
    geospin.add_argument("--velocity", required=True, help="Velocity, comma-separated")
    _add_output_args(geospin, OutputFormat.JSON)

    geodesic = subparsers.add_parser("geodesic", help="Integrate a geodesic (or a sweep of them) with RK4")
    _add_manifold_args(geodesic)
    geodesic.add_argument("--velocity", action="append", required=True, help="Initial velocity; repeat with --sweep")
    geodesic.add_argument("--t-end", type=float, default=settings.t_end, help="Integration end time")
    geodesic.add_argument("--h", type=float, default=settings.integrator_step, help="RK4 step")
    geodesic.add_argument("--sweep", action="store_true", help="One trajectory per --velocity, in parallel")
    geodesic.add_argument("--workers", type=int, default=settings.sweep_workers, help="Sweep workers (0 = one per CPU)")
    geodesic.add_argument("--plot-data", type=Path, help="Directory for gnuplot two-column files")
    _add_output_args(geodesic, OutputFormat.CSV)

    spectrum = subparsers.add_parser("spectrum", help="eig(W) and the geometric Hamiltonian spectrum")
    _add_manifold_args(spectrum)
    spectrum.add_argument("--velocity", required=True, help="Velocity, comma-separated")
    spectrum.add_argument("--hbar", type=float, default=settings.hbar)
    _add_output_args(spectrum, OutputFormat.JSON)

    ricci = subparsers.add_parser("ricci-flow", help="Ricci flow at a point and the curvature/Hamiltonian check")
    _add_manifold_args(ricci)
    ricci.add_argument("--t-end", type=float, default=settings.t_end)
    ricci.add_argument("--h", type=float, default=settings.integrator_step)
    ricci.add_argument("--hbar", type=float, default=settings.hbar)
    ricci.add_argument("--mode", choices=[m.value for m in FlowMode], default=FlowMode.AUTO.value)
    ricci.add_argument("--summary", type=Path, help="Also write the JSON summary here (with --format csv)")
    ricci.add_argument("--plot-data", type=Path, help="Directory for gnuplot two-column files")
    _add_output_args(ricci, OutputFormat.CSV)

    verify = subparsers.add_parser("verify", help="Run the invariant and oracle suite")
    verify.add_argument("--seed", type=int, default=settings.seed)
    verify.add_argument("--only", action="append", default=[], choices=GROUPS, help="Restrict to a check group")
    _add_output_args(verify, OutputFormat.JSON)

    listing = subparsers.add_parser("list-manifolds", help="Names and dimensions of the built-in manifolds")
    _add_output_args(listing, OutputFormat.JSON)
    return parser


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <8} | {message}")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Fold parsed flags into a validated RunConfig."""
    values: dict[str, Any] = {
        "output_format": args.output_format,
        "output": args.output,
    }
    if hasattr(args, "point"):
        values["manifold"] = args.manifold
        values["manifest"] = args.manifest
        check_dim_flag(args.manifold, args.manifest, args.dim)
        values["params"] = parse_params(args.param, args.dim)
        values["point"] = parse_reals(args.point)
    velocities = getattr(args, "velocity", None)
    if isinstance(velocities, list):
        values["velocities"] = [parse_reals(v) for v in velocities]
        values["velocity"] = values["velocities"][0]
    elif velocities is not None:
        values["velocity"] = parse_reals(velocities)
    for flag, key in (("hbar", "hbar"), ("h", "h"), ("t_end", "t_end"), ("seed", "seed"), ("workers", "workers")):
        if hasattr(args, flag):
            values[key] = getattr(args, flag)
    if hasattr(args, "plot_data"):
        values["plot_data"] = args.plot_data
    if hasattr(args, "mode"):
        values["flow_mode"] = args.mode
    if hasattr(args, "only"):
        values["only"] = args.only
    return RunConfig(**values)


def load_field(config: RunConfig) -> MetricField:
    if config.manifest is not None:
        return load_manifest(config.manifest)
    return builtin_manifold(config.manifold, config.params)


def _emit_model(config: RunConfig, model, to_csv: Callable) -> None:
    text = model_json(model) if config.output_format == OutputFormat.JSON else to_csv(model)
    emit(text, config.output)


def cmd_christoffel(config: RunConfig, args: argparse.Namespace) -> int:
    field = load_field(config)
    _emit_model(config, christoffel_output(field, christoffel_at(field, config.point)), christoffel_csv)
    return EXIT_OK


def cmd_geospin(config: RunConfig, args: argparse.Namespace) -> int:
    field = load_field(config)
    W = geospin_matrix(christoffel_at(field, config.point), config.velocity)
    _emit_model(config, geospin_output(field, W), geospin_csv)
    return EXIT_OK


def cmd_spectrum(config: RunConfig, args: argparse.Namespace) -> int:
    field = load_field(config)
    W = geospin_matrix(christoffel_at(field, config.point), config.velocity)
    spectrum = geometric_spectrum(W, config.hbar)
    _emit_model(config, spectrum_output(field, W, spectrum), spectrum_csv)
    return EXIT_OK


def cmd_geodesic(config: RunConfig, args: argparse.Namespace) -> int:
    field = load_field(config)
    if args.sweep or len(config.velocities) > 1:
        runs = run_sweep(field, config.point, config.velocities, config.t_end, config.h, config.workers)
        sweep = SweepOutput(runs=runs)
        if config.output_format == OutputFormat.JSON:
            emit(model_json(sweep), config.output)
        else:
            emit(sweep_csv(runs, field.dimension), config.output)
        failed = [i for i, run in enumerate(runs) if run.error]
        for index in failed:
            logger.error(f"Sweep run {index} stopped early: {runs[index].error}")
        return EXIT_FAILURE if failed else EXIT_OK

    traj = integrate_geodesic(field, GeodesicState.of(field, config.point, config.velocity), config.t_end, config.h)
    residual = logdet_rate_residual(traj) if len(traj.samples) >= 3 else None
    _emit_model(config, trajectory_output(traj, residual), trajectory_csv)
    if config.plot_data is not None:
        times = traj.times
        series = {f"x{i + 1}": (times, traj.positions[:, i]) for i in range(field.dimension)}
        series["speed"] = (times, traj.speeds)
        series["w_r"] = (times, traj.w_r)
        series["log_sqrt_det"] = (times, traj.log_sqrt_det)
        write_plot_data(config.plot_data, "geodesic", series)
    return EXIT_OK


def cmd_ricci_flow(config: RunConfig, args: argparse.Namespace) -> int:
    field = load_field(config)
    traj = ricci_flow_integrate(field, config.point, config.t_end, config.h, config.flow_mode)
    out = ricci_flow_output(traj, corollary_check(traj, config.hbar))
    _emit_model(config, out, ricci_flow_csv)
    if args.summary is not None:
        emit(model_json(out), args.summary)
    if config.plot_data is not None:
        series = {
            "c": (traj.times, traj.scale),
            "R": (traj.times, traj.scalar),
            "w_r": (traj.times, traj.w_r),
            "residual": (traj.times, traj.residual),
        }
        write_plot_data(config.plot_data, "ricci_flow", series)
    status = "passed" if out.corollary.passed else "FAILED"
    logger.info(f"Corollary check {status}: max |H − iħR| = {out.corollary.max_abs_difference:.3e}")
    return EXIT_OK if out.corollary.passed else EXIT_FAILURE


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    report = run_verify(config.seed, config.only)
    _emit_model(config, report, verification_csv)
    failed = [c for c in report.checks if not c.passed]
    for check in failed:
        logger.error(f"FAILED [{check.group}] {check.name} on {check.manifold}: {check.observed:.3e} > {check.tolerance:.1e}")
    logger.info(summarize(report.checks))
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_list_manifolds(config: RunConfig, args: argparse.Namespace) -> int:
    summaries = [ManifoldSummary(**entry) for entry in list_manifolds()]
    if config.output_format == OutputFormat.JSON:
        text = "[\n" + ",\n".join(s.model_dump_json(indent=2) for s in summaries) + "\n]\n"
    else:
        text = manifolds_csv(summaries)
    emit(text, config.output)
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "christoffel": cmd_christoffel,
    "geospin": cmd_geospin,
    "geodesic": cmd_geodesic,
    "spectrum": cmd_spectrum,
    "ricci-flow": cmd_ricci_flow,
    "verify": cmd_verify,
    "list-manifolds": cmd_list_manifolds,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return int(exc.code or 0)

    try:
        configure_logging(args.log_level)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"geospin: invalid --log-level: {exc}\n")
        return EXIT_USAGE

    try:
        config = resolve_config(args)
    except (UsageError, ValidationError) as exc:
        parser.print_usage(sys.stderr)
        logger.error(f"{args.command}: {exc}")
        return EXIT_USAGE
    except GeometryError as exc:
        logger.error(f"{args.command} failed during {exc.step}: {exc}")
        return EXIT_FAILURE

    try:
        return COMMANDS[args.command](config, args)
    except GeometryError as exc:
        where = f" (last valid x = {exc.details['x']})" if "x" in exc.details else ""
        logger.error(f"{args.command} failed during {exc.step}: {exc}{where}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
