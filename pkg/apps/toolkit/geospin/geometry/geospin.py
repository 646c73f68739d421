"""Geospin variables and the geospin matrix.

Storage convention, used by every module and by the CLI output:

    w[i][j] = Wⁱⱼ = Γⁱⱼₖ vᵏ    (row = upper index, column = lower index)

so the geodesic acceleration is dv = −w @ v, and the trace w⁽ʳ⁾ = Σᵢ Wⁱᵢ
equals A·v with A the log-volume gradient.
"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import DimensionMismatchError, InvalidParameterError
from geospin.geometry.connection import ChristoffelAtPoint, contract_velocity
from geospin.geometry.manifold import ChartPoint, IndexPosition, PointLike, TangentVector


@dataclass(frozen=True, eq=False)
class GeospinMatrix:
    w: np.ndarray
    point: ChartPoint
    velocity: TangentVector
    trace_w: float  # w⁽ʳ⁾
    a_dot_v: float
    trace_residual: float  # |trace_w − A·v|


@dataclass(frozen=True, eq=False)
class LoweredGeospin:
    w_low: np.ndarray  # W_ik = Γʲᵢₖ vⱼ, symmetric
    point: ChartPoint
    velocity: TangentVector


def _vector(ch: ChristoffelAtPoint, v: "TangentVector | PointLike", position: IndexPosition) -> TangentVector:
    vector = v if isinstance(v, TangentVector) else TangentVector(tuple(v), position)
    if vector.index_position != position:
        raise InvalidParameterError("index_position", vector.index_position.value, f"expected {position.value}")
    if len(vector) != ch.dimension:
        raise DimensionMismatchError(ch.dimension, len(vector), "velocity")
    return vector


def geospin_matrix(ch: ChristoffelAtPoint, v: "TangentVector | PointLike") -> GeospinMatrix:
    """Wⁱⱼ = Γⁱⱼₖ vᵏ with its trace cross-checked against A·v."""
    vector = _vector(ch, v, IndexPosition.UPPER)
    components = vector.as_array()
    w = contract_velocity(ch.gamma, components)
    trace_w = float(np.trace(w))
    a_dot_v = float(ch.A @ components)
    residual = abs(trace_w - a_dot_v)
    if residual > settings.trace_identity_tol * (1.0 + abs(a_dot_v)):
        logger.warning(f"tr W = {trace_w!r} but A·v = {a_dot_v!r} at {list(ch.point)} (residual {residual:.3e})")
    return GeospinMatrix(
        w=w, point=ch.point, velocity=vector, trace_w=trace_w, a_dot_v=a_dot_v, trace_residual=residual
    )


def geospin_lowered(ch: ChristoffelAtPoint, v_low: "TangentVector | PointLike") -> LoweredGeospin:
    """W_ik = Γʲᵢₖ vⱼ from a covariant velocity."""
    vector = _vector(ch, v_low, IndexPosition.LOWER)
    w_low = np.einsum("jik,j->ik", ch.gamma, vector.as_array())
    return LoweredGeospin(w_low=w_low, point=ch.point, velocity=vector)


def split_diag_offdiag(W: "GeospinMatrix | np.ndarray") -> tuple[np.ndarray, np.ndarray]:
    """W = W_r + W_a with W_r diagonal and W_a hollow; the sum is exact."""
    w = W.w if isinstance(W, GeospinMatrix) else np.asarray(W, dtype=float)
    w_r = np.diag(np.diag(w))
    w_a = w.copy()
    np.fill_diagonal(w_a, 0.0)
    return w_r, w_a


def _as_jacobian(jacobian, n: int) -> np.ndarray:
    jac = np.asarray(jacobian, dtype=float)
    if jac.shape != (n, n):
        raise DimensionMismatchError(n, jac.shape[0] if jac.ndim else 0, "jacobian")
    return jac


def covariant_derivative(jacobian, W: "GeospinMatrix | np.ndarray") -> np.ndarray:
    """∇ₖvʲ = ∂vʲ/∂xᵏ + Wʲₖ.

    Args:
        jacobian: jacobian[k][j] = ∂vʲ/∂xᵏ
        W: Geospin matrix of the field's value at the same point

    Returns:
        result[k][j] = ∇ₖvʲ
    """
    w = W.w if isinstance(W, GeospinMatrix) else np.asarray(W, dtype=float)
    jac = _as_jacobian(jacobian, w.shape[0])
    return jac + w.T


def covariant_derivative_lowered(jacobian_low, W_low: "LoweredGeospin | np.ndarray") -> np.ndarray:
    """∇ₖvⱼ = ∂vⱼ/∂xᵏ − W_kj, with jacobian_low[k][j] = ∂vⱼ/∂xᵏ."""
    w_low = W_low.w_low if isinstance(W_low, LoweredGeospin) else np.asarray(W_low, dtype=float)
    jac = _as_jacobian(jacobian_low, w_low.shape[0])
    return jac - w_low


def geodesic_quadratic_term(ch: ChristoffelAtPoint, v: "TangentVector | PointLike") -> np.ndarray:
    """Γⁱⱼₖ vʲ vᵏ, the quadratic term of the geodesic equation."""
    components = _vector(ch, v, IndexPosition.UPPER).as_array()
    return np.einsum("ijk,j,k->i", ch.gamma, components, components)
