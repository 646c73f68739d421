"""Conversion of results to the JSON/CSV/plot-data artifacts.

CSV floats are written with repr (shortest round-trip form), so output is
byte-identical for identical inputs.
"""

import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from geospin.api.schemas import (
    ChristoffelOutput,
    ComplexValue,
    GeospinOutput,
    ManifoldSummary,
    RicciFlowOutput,
    RicciFlowSampleOut,
    SpectrumOutput,
    TrajectoryOutput,
    TrajectorySample,
    VerificationReport,
)
from geospin.dynamics.geodesic import GeodesicTrajectory
from geospin.geometry.connection import ChristoffelAtPoint
from geospin.geometry.geospin import GeospinMatrix, split_diag_offdiag
from geospin.geometry.manifold import MetricField
from geospin.geometry.ricci_flow import RicciFlowTrajectory
from geospin.spectrum.hamiltonian import ComplexSpectrum, hamiltonian_matrix


def to_list(a: np.ndarray) -> list:
    """Nested lists of plain floats."""
    return np.asarray(a, dtype=float).tolist()


def trajectory_output(
    traj: GeodesicTrajectory, logdet_residual: Optional[float] = None, error: Optional[str] = None
) -> TrajectoryOutput:
    samples = [
        TrajectorySample(t=s.t, x=list(s.x.coordinates), v=list(s.v.components), speed=speed, w_r=w_r)
        for s, speed, w_r in zip(traj.samples, traj.speeds, traj.w_r)
    ]
    return TrajectoryOutput(
        manifold=traj.manifold.name,
        h=traj.h,
        samples=samples,
        speed_drift=traj.speed_drift,
        logdet_rate_residual=logdet_residual,
        error=error,
    )


def ricci_flow_output(traj: RicciFlowTrajectory, corollary) -> RicciFlowOutput:
    samples = [
        RicciFlowSampleOut(t=t, c=c, scalar_curvature=R, w_r=w_r, residual=res)
        for t, c, R, w_r, res in zip(traj.times, traj.scale, traj.scalar, traj.w_r, traj.residual)
    ]
    return RicciFlowOutput(
        manifold=traj.manifold,
        mode=traj.mode,
        point=list(traj.point.coordinates),
        h=traj.h,
        einstein_constant=traj.einstein_constant,
        extinct=traj.extinct,
        extinction_time=traj.extinction_time,
        samples=samples,
        corollary=corollary,
    )


def christoffel_output(metric: MetricField, ch: ChristoffelAtPoint) -> ChristoffelOutput:
    return ChristoffelOutput(
        manifold=metric.name,
        coordinates=list(metric.coordinates),
        point=list(ch.point.coordinates),
        gamma=to_list(ch.gamma),
        log_volume_gradient=to_list(ch.A),
        trace_residual=ch.trace_residual,
    )


def geospin_output(metric: MetricField, W: GeospinMatrix) -> GeospinOutput:
    w_r, w_a = split_diag_offdiag(W)
    return GeospinOutput(
        manifold=metric.name,
        point=list(W.point.coordinates),
        velocity=list(W.velocity.components),
        w=to_list(W.w),
        w_r=to_list(w_r),
        w_a=to_list(w_a),
        trace=W.trace_w,
        a_dot_v=W.a_dot_v,
    )


def spectrum_output(metric: MetricField, W: GeospinMatrix, spectrum: ComplexSpectrum) -> SpectrumOutput:
    H = hamiltonian_matrix(W, spectrum.hbar)
    return SpectrumOutput(
        manifold=metric.name,
        point=list(W.point.coordinates),
        velocity=list(W.velocity.components),
        hbar=spectrum.hbar,
        W=to_list(W.w),
        hamiltonian=[[ComplexValue.of(z) for z in row] for row in H.entries],
        energies=to_list(H.energies),
        eig_W=[ComplexValue.of(z) for z in spectrum.eigenvalues],
        lambda_re=[ComplexValue.of(z) for z in spectrum.mapped],
        residuals=spectrum.residuals,
        eigenvector_reliable=spectrum.reliable,
        trace_w=W.trace_w,
        hamiltonian_crosscheck=spectrum.crosscheck_residual or 0.0,
    )


def _cell(value) -> str | int:
    if value is None:
        return ""
    if isinstance(value, (int, str)):
        return value
    return repr(float(value))


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def trajectory_header(dimension: int, with_run: bool = False) -> list[str]:
    """t, x1..xn, v1..vn, speed, w_r (prefixed by run for sweeps)."""
    header = ["t"] + [f"x{i + 1}" for i in range(dimension)] + [f"v{i + 1}" for i in range(dimension)] + ["speed", "w_r"]
    return (["run"] + header) if with_run else header


def _trajectory_rows(out: TrajectoryOutput, run: Optional[int] = None):
    for s in out.samples:
        row = [s.t, *s.x, *s.v, s.speed, s.w_r]
        yield ([run] + row) if run is not None else row


def trajectory_csv(out: TrajectoryOutput) -> str:
    dimension = len(out.samples[0].x) if out.samples else 0
    return _csv_text(trajectory_header(dimension), _trajectory_rows(out))


def sweep_csv(runs: Sequence[TrajectoryOutput], dimension: int) -> str:
    rows = (row for index, out in enumerate(runs) for row in _trajectory_rows(out, index))
    return _csv_text(trajectory_header(dimension, with_run=True), rows)


def ricci_flow_csv(out: RicciFlowOutput) -> str:
    return _csv_text(
        ["t", "c", "R", "w_r", "residual"],
        ([s.t, s.c, s.scalar_curvature, s.w_r, s.residual] for s in out.samples),
    )


def christoffel_csv(out: ChristoffelOutput) -> str:
    """One row per Γ^k_ij."""
    rows = (
        [k, i, j, value]
        for k, plane in enumerate(out.gamma)
        for i, row in enumerate(plane)
        for j, value in enumerate(row)
    )
    return _csv_text(["k", "i", "j", "gamma"], rows)


def geospin_csv(out: GeospinOutput) -> str:
    rows = (
        [i, j, out.w[i][j], out.w_r[i][j], out.w_a[i][j]]
        for i in range(len(out.w))
        for j in range(len(out.w))
    )
    return _csv_text(["i", "j", "w", "w_r", "w_a"], rows)


def spectrum_csv(out: SpectrumOutput) -> str:
    rows = (
        [k, lam.re, lam.im, mapped.re, mapped.im, residual]
        for k, (lam, mapped, residual) in enumerate(zip(out.eig_W, out.lambda_re, out.residuals))
    )
    return _csv_text(["k", "eig_re", "eig_im", "lambda_re_re", "lambda_re_im", "residual"], rows)


def verification_csv(report: VerificationReport) -> str:
    rows = ([c.group, c.name, c.manifold, c.tolerance, c.observed, int(c.passed)] for c in report.checks)
    return _csv_text(["group", "name", "manifold", "tolerance", "observed", "passed"], rows)


def manifolds_csv(summaries: Sequence[ManifoldSummary]) -> str:
    return _csv_text(["name", "dimension", "description"], ([s.name, s.dimension, s.description] for s in summaries))


def model_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"


def emit(text: str, path: Optional[Path]) -> None:
    """Write the primary artifact to `path`, or stdout when no path is given."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text, encoding="utf-8")


def write_plot_data(directory: Path, prefix: str, series: dict[str, tuple[Sequence[float], Sequence[float]]]) -> list[Path]:
    """One whitespace-separated two-column .dat file per series, for gnuplot."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, (xs, ys) in series.items():
        path = directory / f"{prefix}_{name}.dat"
        lines = [f"# {name}"] + [f"{float(x)!r} {float(y)!r}" for x, y in zip(xs, ys)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written
