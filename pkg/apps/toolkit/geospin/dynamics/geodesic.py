"""Geodesic flow as the first-order system dx/dt = v, dv/dt = −W(x, v) v.

Integration is fixed-step RK4 over the joint (x, v) state. A trajectory that
leaves the chart domain stops with an IntegrationError carrying the last
accepted state; it is never extrapolated across a chart boundary.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import (
    ChartDomainError,
    DegenerateMetricError,
    EvaluationDomainError,
    InsufficientSamplesError,
    IntegrationError,
)
from geospin.dynamics.integrator import rk4_step, sample_times, step_count
from geospin.geometry.connection import christoffel_from_partials, contract_velocity, metric_partials_at
from geospin.geometry.manifold import (
    ChartPoint,
    MetricAtPoint,
    MetricField,
    PointLike,
    TangentVector,
    as_point,
    as_vector,
    metric_at,
    sample_point,
    sample_vector,
)

_LEFT_DOMAIN = (ChartDomainError, DegenerateMetricError, EvaluationDomainError)


@dataclass(frozen=True)
class GeodesicState:
    t: float
    x: ChartPoint
    v: TangentVector

    @classmethod
    def of(cls, field_: MetricField, x: "ChartPoint | PointLike", v: "TangentVector | PointLike", t: float = 0.0):
        return cls(t=float(t), x=as_point(field_, x), v=as_vector(field_, v))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x.as_array(), self.v.as_array()])


@dataclass
class GeodesicTrajectory:
    """Accepted samples with the per-sample speed, w⁽ʳ⁾ and ln√g."""

    manifold: MetricField
    h: float
    samples: list[GeodesicState] = field(default_factory=list)
    speeds: list[float] = field(default_factory=list)
    w_r: list[float] = field(default_factory=list)
    log_sqrt_det: list[float] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s.x.coordinates for s in self.samples])

    @property
    def velocities(self) -> np.ndarray:
        return np.array([s.v.components for s in self.samples])

    @property
    def speed_drift(self) -> float:
        return max(abs(s - self.speeds[0]) for s in self.speeds) if self.speeds else 0.0

    def final(self) -> GeodesicState:
        return self.samples[-1]


def _connection_at(field_: MetricField, x: "ChartPoint | PointLike") -> tuple[MetricAtPoint, np.ndarray]:
    metric = metric_at(field_, x)
    dg = metric_partials_at(field_, metric.point)
    return metric, christoffel_from_partials(metric.g_inv, dg)


def _acceleration(field_: MetricField, x: np.ndarray, v: np.ndarray) -> np.ndarray:
    _, gamma = _connection_at(field_, tuple(x))
    return -contract_velocity(gamma, v) @ v


def geodesic_rhs(field_: MetricField, s: GeodesicState) -> tuple[np.ndarray, np.ndarray]:
    """(dx, dv) = (v, −W(x, v)·v).

    Raises:
        ChartDomainError: s.x outside the chart
    """
    v = s.v.as_array()
    return v.copy(), _acceleration(field_, s.x.as_array(), v)


def speed(field_: MetricField, s: GeodesicState) -> float:
    """‖v‖_g = √(g_ij vⁱ vʲ) at the state's base point."""
    v = s.v.as_array()
    g = metric_at(field_, s.x).g
    return math.sqrt(max(float(v @ g @ v), 0.0))


def _record(traj: GeodesicTrajectory, field_: MetricField, t: float, y: np.ndarray) -> None:
    n = field_.dimension
    x, v = y[:n], y[n:]
    metric, gamma = _connection_at(field_, tuple(x))
    traj.samples.append(GeodesicState(t=t, x=metric.point, v=TangentVector(tuple(v))))
    traj.speeds.append(math.sqrt(max(float(v @ metric.g @ v), 0.0)))
    traj.w_r.append(float(np.trace(contract_velocity(gamma, v))))
    traj.log_sqrt_det.append(metric.log_sqrt_det)


def integrate_geodesic(
    field_: MetricField,
    s0: GeodesicState,
    t_end: Optional[float] = None,
    h: Optional[float] = None,
) -> GeodesicTrajectory:
    """Integrate the geodesic flow from s0 to t_end with classical RK4.

    Args:
        field_: The metric
        s0: Initial state; must be inside the chart
        t_end: Final curve parameter, default settings.t_end
        h: Step, default settings.integrator_step

    Returns:
        Every accepted sample, the last one exactly at t_end

    Raises:
        ChartDomainError: s0 outside the chart
        InvalidParameterError: h <= 0 or t_end <= s0.t
        IntegrationError: trajectory left the chart or became nonfinite;
            `last_state` is the last accepted GeodesicState and `partial`
            the trajectory up to it
    """
    t_end = settings.t_end if t_end is None else t_end
    h = settings.integrator_step if h is None else h
    n = field_.dimension
    steps = step_count(s0.t, t_end, h)
    metric_at(field_, s0.x)

    def f(_t: float, y: np.ndarray) -> np.ndarray:
        return np.concatenate([y[n:], _acceleration(field_, y[:n], y[n:])])

    traj = GeodesicTrajectory(manifold=field_, h=h)
    y = s0.as_array()
    _record(traj, field_, s0.t, y)
    times = sample_times(s0.t, t_end, h)
    for t, t_next in zip(times, times[1:]):
        try:
            y_next = rk4_step(f, t, y, t_next - t)
            if not np.all(np.isfinite(y_next)):
                last = traj.final()
                raise IntegrationError(
                    f"Nonfinite state at t = {t_next!r}",
                    last,
                    details={"t": last.t, "x": list(last.x), "v": list(last.v.components)},
                    partial=traj,
                )
            _record(traj, field_, t_next, y_next)
        except _LEFT_DOMAIN as exc:
            last = traj.final()
            logger.info(f"Geodesic on '{field_.name}' left the chart near t = {t_next!r}: {exc}")
            raise IntegrationError(
                f"Trajectory left the chart domain between t = {t!r} and t = {t_next!r}: {exc}",
                last,
                details={"t": last.t, "x": list(last.x), "v": list(last.v.components)},
                partial=traj,
            ) from exc
        y = y_next
    logger.debug(f"Integrated {steps} RK4 steps on '{field_.name}' (h = {h!r})")
    tolerance = settings.speed_drift_tol * (1.0 + traj.speeds[0])
    if traj.speed_drift > tolerance:
        logger.warning(
            f"Speed drift {traj.speed_drift:.3e} on '{field_.name}' exceeds {tolerance:.3e}; reduce h (now {h!r})"
        )
    return traj


def logdet_rate_residual(traj: GeodesicTrajectory) -> float:
    """max over interior samples of |d/dt ln√g(x(t)) − w⁽ʳ⁾(x(t), v(t))|.

    The time derivative is the second-order central difference on the
    (possibly nonuniform) sample grid.
    """
    count = len(traj.samples)
    if count < 3:
        raise InsufficientSamplesError(3, count)
    t = traj.times
    f = np.array(traj.log_sqrt_det)
    worst = 0.0
    for i in range(1, count - 1):
        h1 = t[i] - t[i - 1]
        h2 = t[i + 1] - t[i]
        rate = (h1 * h1 * f[i + 1] - h2 * h2 * f[i - 1] + (h2 * h2 - h1 * h1) * f[i]) / (h1 * h2 * (h1 + h2))
        worst = max(worst, abs(rate - traj.w_r[i]))
    return float(worst)


def endpoint_error(field_: MetricField, s0: GeodesicState, t_end: float, h: float, reference: np.ndarray) -> float:
    return float(np.max(np.abs(integrate_geodesic(field_, s0, t_end, h).final().as_array() - reference)))


def convergence_factor(
    field_: MetricField,
    s0: GeodesicState,
    t_end: float,
    h: float,
    reference_h: Optional[float] = None,
) -> float:
    """error(h) / error(h/2) at t_end against a fine-step reference; 16 for RK4."""
    reference_h = settings.rk4_reference_step if reference_h is None else reference_h
    reference = integrate_geodesic(field_, s0, t_end, reference_h).final().as_array()
    coarse = endpoint_error(field_, s0, t_end, h, reference)
    fine = endpoint_error(field_, s0, t_end, h / 2.0, reference)
    if fine == 0.0:
        return math.inf if coarse > 0.0 else math.nan
    return coarse / fine


def unit_speed_start(field_: MetricField, rng: np.random.Generator) -> GeodesicState:
    """A sampled in-domain point with a random direction scaled to ‖v‖_g = 1."""
    p = sample_point(field_, rng)
    direction = sample_vector(field_, rng).as_array()
    g = metric_at(field_, p).g
    return GeodesicState.of(field_, p, direction / math.sqrt(float(direction @ g @ direction)))


def random_unit_geodesic(
    field_: MetricField,
    rng: np.random.Generator,
    t_end: float = 5.0,
    h: float = 1e-3,
    attempts: int = 5,
) -> GeodesicTrajectory:
    """Integrate a unit-speed geodesic from a random start, redrawing starts
    whose geodesic leaves the chart before t_end.

    Raises:
        IntegrationError: every one of `attempts` starts left the chart
    """
    error: Optional[IntegrationError] = None
    for _ in range(attempts):
        try:
            return integrate_geodesic(field_, unit_speed_start(field_, rng), t_end, h)
        except IntegrationError as exc:
            error = exc
    logger.warning(f"All {attempts} unit-speed starts on '{field_.name}' left the chart before t = {t_end!r}")
    raise error
