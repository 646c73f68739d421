"""Parallel geodesic sweeps over initial velocities.

Each run is independent; `executor.map` returns results in input order, so
the merged output does not depend on which worker finishes first. Fields are
sent to workers by pickling their ASTs; compiled closures are rebuilt there.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from loguru import logger

from geospin.api.schemas import TrajectoryOutput
from geospin.core.errors import GeometryError, IntegrationError
from geospin.dynamics.geodesic import GeodesicState, integrate_geodesic, logdet_rate_residual
from geospin.geometry.manifold import MetricField
from geospin.output import trajectory_output


def run_one(job: tuple[MetricField, tuple[float, ...], tuple[float, ...], float, float]) -> TrajectoryOutput:
    field, x0, v0, t_end, h = job
    try:
        traj = integrate_geodesic(field, GeodesicState.of(field, x0, v0), t_end, h)
    except IntegrationError as exc:
        if exc.partial is None:
            return TrajectoryOutput(manifold=field.name, h=h, samples=[], speed_drift=0.0, error=str(exc))
        kept = len(exc.partial.samples)
        logger.info(f"Run from v = {v0} stopped at t = {exc.last_state.t!r}; keeping {kept} samples")
        return trajectory_output(exc.partial, error=str(exc))
    except GeometryError as exc:
        return TrajectoryOutput(manifold=field.name, h=h, samples=[], speed_drift=0.0, error=str(exc))
    residual = logdet_rate_residual(traj) if len(traj.samples) >= 3 else None
    return trajectory_output(traj, residual)


def resolve_workers(workers: int) -> int:
    return workers if workers > 0 else (os.cpu_count() or 1)


def run_sweep(
    field: MetricField,
    x0: Sequence[float],
    velocities: Sequence[Sequence[float]],
    t_end: float,
    h: float,
    workers: int = 0,
) -> list[TrajectoryOutput]:
    """Integrate one geodesic per velocity; results come back in input order."""
    jobs = [(field, tuple(x0), tuple(v), t_end, h) for v in velocities]
    count = min(resolve_workers(workers), len(jobs))
    logger.info(f"Sweeping {len(jobs)} geodesics on '{field.name}' with {count} worker(s)")
    if count <= 1:
        return [run_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=count) as executor:
        return list(executor.map(run_one, jobs))
