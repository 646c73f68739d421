"""Levi-Civita connection: Christoffel symbols and the log-volume gradient.

Storage order is gamma[k][i][j] = Γᵏᵢⱼ (upper index first, then the two lower
indices). Partials of the metric come from the exact symbolic derivatives
cached on the MetricField.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import DimensionMismatchError, InvalidParameterError
from geospin.expr import Const, compile_expr, differentiate, simplify
from geospin.expr.nodes import Unary
from geospin.geometry.manifold import (
    ChartPoint,
    IndexPosition,
    MetricAtPoint,
    MetricField,
    PointLike,
    TangentVector,
    evaluate_grid,
    metric_at,
)


@dataclass(frozen=True, eq=False)
class ChristoffelAtPoint:
    """Γᵏᵢⱼ and Aⱼ = ∂ⱼ ln√g at one point."""

    gamma: np.ndarray  # (n, n, n), gamma[k, i, j] = Γᵏᵢⱼ
    A: np.ndarray  # (n,)
    point: ChartPoint
    metric: MetricAtPoint
    trace_residual: float  # max_j |Σₖ Γᵏₖⱼ − Aⱼ|

    @property
    def dimension(self) -> int:
        return self.gamma.shape[0]


def metric_partials_at(field: MetricField, p: "ChartPoint | PointLike") -> np.ndarray:
    """dg[k, i, j] = ∂ₖ g_ij at p (no domain check)."""
    coords = tuple(p)
    return np.array([evaluate_grid(grid, coords) for grid in field.compiled_metric_partials])


def christoffel_from_partials(g_inv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢ g_jl + ∂ⱼ g_il − ∂ₗ g_ij)."""
    # first[l, i, j] = Γ_lij, Christoffel symbols of the first kind
    first = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    gamma = np.einsum("kl,lij->kij", g_inv, first)
    # exact lower-index symmetry, independent of einsum summation order
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


def _log_volume_gradient_exprs(field: MetricField):
    det = field.det_expr
    if det is None:
        return None
    half_log_det = simplify(Const(0.5) * Unary("ln", det))
    exprs = tuple(differentiate(half_log_det, j) for j in range(field.dimension))
    return tuple(compile_expr(e) for e in exprs)


def log_volume_gradient(
    field: MetricField,
    p: "ChartPoint | PointLike",
    metric: Optional[MetricAtPoint] = None,
    dg: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Aⱼ = ∂ⱼ ln√det g.

    Differentiates ½ ln det g symbolically; above `symbolic_det_max_dim` falls
    back to Jacobi's formula ½ tr(g⁻¹ ∂ⱼ g).
    """
    metric = metric or metric_at(field, p)
    compiled = field.cached("log_volume_gradient", lambda: _log_volume_gradient_exprs(field))
    if compiled is not None:
        coords = metric.point.coordinates
        return np.array([fn(coords) for fn in compiled])
    if dg is None:
        dg = metric_partials_at(field, metric.point)
    return 0.5 * np.einsum("ab,jba->j", metric.g_inv, dg)


def christoffel_trace(ch: ChristoffelAtPoint) -> np.ndarray:
    """Σₖ Γᵏₖⱼ for each j."""
    return np.einsum("kkj->j", ch.gamma)


def christoffel_at(field: MetricField, p: "ChartPoint | PointLike") -> ChristoffelAtPoint:
    """Christoffel symbols of the Levi-Civita connection at p.

    Raises:
        ChartDomainError: p outside the chart
        DegenerateMetricError: metric not positive definite at p
    """
    metric = metric_at(field, p)
    dg = metric_partials_at(field, metric.point)
    gamma = christoffel_from_partials(metric.g_inv, dg)
    A = log_volume_gradient(field, metric.point, metric=metric, dg=dg)
    trace = np.einsum("kkj->j", gamma)
    residual = float(np.max(np.abs(trace - A)))
    scale = 1.0 + float(np.max(np.abs(A)))
    if residual > settings.trace_identity_tol * scale:
        logger.warning(
            f"Trace identity residual {residual:.3e} at {list(metric.point)} on '{field.name}'"
        )
    return ChristoffelAtPoint(gamma=gamma, A=A, point=metric.point, metric=metric, trace_residual=residual)


def contract_velocity(gamma: np.ndarray, v: np.ndarray) -> np.ndarray:
    """w[i, j] = Γⁱⱼₖ vᵏ."""
    if v.shape != (gamma.shape[0],):
        raise DimensionMismatchError(gamma.shape[0], v.shape[0] if v.ndim else 0, "velocity")
    return np.einsum("ijk,k->ij", gamma, v)


def connection_one_form_coeffs(ch: ChristoffelAtPoint, v: "TangentVector | PointLike") -> np.ndarray:
    """Coefficients of the connection one-form ωⁱⱼ = Γⁱⱼₖ dxᵏ along velocity v, in the dt basis.

    This is the geospin matrix, entry for entry.

    Raises:
        InvalidParameterError: v carries a lower index
    """
    vector = v if isinstance(v, TangentVector) else TangentVector(tuple(v))
    if vector.index_position != IndexPosition.UPPER:
        raise InvalidParameterError("index_position", vector.index_position.value, "expected upper")
    if len(vector) != ch.dimension:
        raise DimensionMismatchError(ch.dimension, len(vector), "velocity")
    return contract_velocity(ch.gamma, vector.as_array())


def metric_compatibility_residual(field: MetricField, p: "ChartPoint | PointLike") -> float:
    """max |∂ₖ g_ij − Γˡₖᵢ g_lj − Γˡₖⱼ g_il|; zero for the Levi-Civita connection."""
    ch = christoffel_at(field, p)
    dg = metric_partials_at(field, ch.point)
    g = ch.metric.g
    term1 = np.einsum("lki,lj->kij", ch.gamma, g)
    term2 = np.einsum("lkj,il->kij", ch.gamma, g)
    return float(np.max(np.abs(dg - term1 - term2)))

