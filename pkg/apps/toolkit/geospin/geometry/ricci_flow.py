"""Ricci flow dg/dt = −2 Ric on homothetic families, and the w⁽ʳ⁾ = −R check.

Two modes:

- homothetic: the metric is Einstein (Ric = ρ g₀ with one ρ over the chart),
  so g(t) = c(t) g₀ with ċ = −2ρ. Ricci is invariant under constant
  rescaling, so ġ = −2 Ric₀ and R(t) = R₀ / c(t).
- pointwise: the metric matrix G(t) at the evaluation point evolves under
  Ġ = −2 Ric, with Ric evaluated on the frozen coordinate expressions. Only
  the evolution at that point is modelled; c(t) = (det G / det G₀)^{1/n}.

The flow stops once c drops to `extinction_threshold`; the extinction time is
where the linear interpolation of c between the last two samples hits zero.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from geospin.api.schemas import ComplexValue, CorollaryReport, CorollarySample, FlowMode
from geospin.core.config import settings
from geospin.core.errors import InvalidParameterError
from geospin.dynamics.integrator import rk4_step, sample_times
from geospin.geometry.curvature import curvature_at, is_einstein, w_r_from_metric_rate
from geospin.geometry.manifold import (
    ChartPoint,
    MetricField,
    PointLike,
    as_point,
    metric_at,
    sample_near,
    sample_point,
)

# Points besides p used to decide whether a metric is Einstein
EINSTEIN_SAMPLE_POINTS = 4


@dataclass
class RicciFlowTrajectory:
    manifold: str
    mode: FlowMode
    point: ChartPoint
    h: float
    einstein_constant: Optional[float]
    times: list[float] = field(default_factory=list)
    scale: list[float] = field(default_factory=list)
    metrics: list[np.ndarray] = field(default_factory=list)
    metric_rates: list[np.ndarray] = field(default_factory=list)
    w_r: list[float] = field(default_factory=list)
    scalar: list[float] = field(default_factory=list)
    residual: list[float] = field(default_factory=list)
    extinct: bool = False
    extinction_time: Optional[float] = None

    def record(self, t: float, c: float, g: np.ndarray, g_dot: np.ndarray, R: float) -> None:
        w_r = w_r_from_metric_rate(g, g_dot)
        self.times.append(t)
        self.scale.append(c)
        self.metrics.append(g)
        self.metric_rates.append(g_dot)
        self.w_r.append(w_r)
        self.scalar.append(R)
        self.residual.append(abs(w_r + R))


def _einstein_sample_points(field_: MetricField, p: ChartPoint, rng: np.random.Generator) -> Optional[list[ChartPoint]]:
    """Points from the sampling box, or from a neighbourhood of p when the box
    misses the domain. None when neither yields in-domain points."""
    try:
        return [sample_point(field_, rng) for _ in range(EINSTEIN_SAMPLE_POINTS)]
    except InvalidParameterError:
        logger.debug(f"Sampling box of '{field_.name}' misses its domain, sampling near {p.coordinates}")
    try:
        return [sample_near(field_, p, rng) for _ in range(EINSTEIN_SAMPLE_POINTS)]
    except InvalidParameterError as exc:
        logger.warning(f"No sample points for the Einstein test on '{field_.name}': {exc}")
        return None


def einstein_constant(field_: MetricField, p: "ChartPoint | PointLike", seed: Optional[int] = None) -> Optional[float]:
    """ρ with Ric = ρ g checked at p and a few seeded sample points, or None.

    None also when no sample points can be drawn; a warning is logged then.
    """
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    point = as_point(field_, p)
    extra = _einstein_sample_points(field_, point, rng)
    if extra is None:
        return None
    return is_einstein(field_, [point] + extra)


def _extinction_time(t0: float, c0: float, t1: float, c1: float) -> float:
    return t0 + c0 * (t1 - t0) / (c0 - c1)


def ricci_flow_integrate(
    field_: MetricField,
    p: "ChartPoint | PointLike",
    t_end: float,
    h: float,
    mode: FlowMode = FlowMode.AUTO,
) -> RicciFlowTrajectory:
    """Integrate the Ricci flow with RK4 and record g, ġ, w⁽ʳ⁾, R and |w⁽ʳ⁾ + R|.

    Args:
        field_: Initial metric g₀
        p: Evaluation point
        t_end: Flow time
        h: RK4 step
        mode: auto picks homothetic when the metric is Einstein, else pointwise

    Raises:
        InvalidParameterError: homothetic mode requested for a non-Einstein metric
    """
    mode = FlowMode(mode)
    metric0 = metric_at(field_, p)
    point = metric0.point
    bundle = curvature_at(field_, point)
    ric0 = bundle.ricci
    R0 = bundle.scalar
    n = field_.dimension

    rho = einstein_constant(field_, point) if mode != FlowMode.POINTWISE else None
    if mode == FlowMode.AUTO:
        mode = FlowMode.HOMOTHETIC if rho is not None else FlowMode.POINTWISE
    elif mode == FlowMode.HOMOTHETIC and rho is None:
        raise InvalidParameterError("mode", mode.value, f"'{field_.name}' is not Einstein; use pointwise")

    traj = RicciFlowTrajectory(manifold=field_.name, mode=mode, point=point, h=h, einstein_constant=rho)
    g_dot = -2.0 * ric0
    times = sample_times(0.0, t_end, h)
    threshold = settings.extinction_threshold

    if mode == FlowMode.HOMOTHETIC:
        rate = -2.0 * rho
        state = np.array([1.0])
        c_prev, t_prev = 1.0, 0.0
        traj.record(0.0, 1.0, metric0.g, g_dot, R0)
        for t, t_next in zip(times, times[1:]):
            state = rk4_step(lambda _t, _y: np.array([rate]), t, state, t_next - t)
            c = float(state[0])
            if c <= threshold:
                traj.extinct = True
                traj.extinction_time = _extinction_time(t_prev, c_prev, t_next, c)
                break
            traj.record(t_next, c, c * metric0.g, g_dot, R0 / c)
            c_prev, t_prev = c, t_next
    else:
        det0 = metric0.det
        G = metric0.g.copy()
        c_prev, t_prev = 1.0, 0.0
        traj.record(0.0, 1.0, G, g_dot, float(np.einsum("jl,jl->", np.linalg.inv(G), ric0)))
        for t, t_next in zip(times, times[1:]):
            G = rk4_step(lambda _t, _y: g_dot, t, G, t_next - t)
            det = float(np.linalg.det(G))
            c = (det / det0) ** (1.0 / n) if det > 0 else 0.0
            if c <= threshold or np.any(np.linalg.eigvalsh(G) <= 0.0):
                traj.extinct = True
                traj.extinction_time = _extinction_time(t_prev, c_prev, t_next, c)
                break
            R = float(np.einsum("jl,jl->", np.linalg.inv(G), ric0))
            traj.record(t_next, c, G, g_dot, R)
            c_prev, t_prev = c, t_next

    if traj.extinct:
        logger.info(f"Ricci flow on '{field_.name}' went extinct at t = {traj.extinction_time:.9g}")
    else:
        logger.info(f"Ricci flow on '{field_.name}' ({mode.value}) reached t = {traj.times[-1]:.6g}")
    return traj


def corollary_check(traj: RicciFlowTrajectory, hbar: Optional[float] = None) -> CorollaryReport:
    """Compare H = −iħw⁽ʳ⁾ against H' = iħR at every flow sample.

    Passes iff max |H − H'| ≤ 1e-6·ħ·(1 + max |R|).
    """
    hbar = settings.hbar if hbar is None else hbar
    if not hbar > 0:
        raise InvalidParameterError("hbar", hbar, "must be positive")
    samples = []
    worst = 0.0
    for t, w_r, R in zip(traj.times, traj.w_r, traj.scalar):
        H = -1j * hbar * w_r
        H_prime = 1j * hbar * R
        worst = max(worst, abs(H - H_prime))
        samples.append(CorollarySample(t=t, H=ComplexValue.of(H), H_prime=ComplexValue.of(H_prime)))
    max_R = max((abs(R) for R in traj.scalar), default=0.0)
    tolerance = 1e-6 * hbar * (1.0 + max_R)
    passed = bool(samples) and worst <= tolerance
    if not passed:
        logger.warning(f"Corollary check failed on '{traj.manifold}': max |H − H'| = {worst:.3e}")
    return CorollaryReport(hbar=hbar, max_abs_difference=worst, tolerance=tolerance, passed=passed, samples=samples)
