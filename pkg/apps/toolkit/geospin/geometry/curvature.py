"""Riemann, Ricci and scalar curvature.

Conventions:

    Rⁱⱼₖₗ = ∂ₖΓⁱₗⱼ − ∂ₗΓⁱₖⱼ + ΓⁱₖₘΓᵐₗⱼ − ΓⁱₗₘΓᵐₖⱼ
    R_jl = Rⁱⱼᵢₗ,   R = g^{jl} R_jl

which gives R = 2/r² on the round sphere and R = −2 on the hyperbolic plane.

∂Γ comes from symbolically differentiating Christoffel expressions built
from the metric ASTs (cofactor inverse, up to `symbolic_christoffel_max_dim`).
Larger charts use the identity ∂g⁻¹ = −g⁻¹ ∂g g⁻¹ together with exact second
partials of the metric.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import DegenerateMetricError, DimensionMismatchError
from geospin.expr import Const, Expr, compile_expr, differentiate, simplify
from geospin.expr.nodes import ZERO, is_const
from geospin.geometry.connection import christoffel_at, metric_partials_at
from geospin.geometry.geospin import geospin_matrix
from geospin.geometry.manifold import (
    ChartPoint,
    MetricField,
    PointLike,
    TangentVector,
    as_vector,
    evaluate_grid,
    metric_at,
    symbolic_determinant,
)


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    riemann: np.ndarray  # riemann[i, j, k, l] = Rⁱⱼₖₗ
    ricci: np.ndarray
    scalar: float
    point: ChartPoint


def _sum(terms: Iterable[Expr]) -> Expr:
    total: Optional[Expr] = None
    for term in terms:
        if is_const(term, 0.0):
            continue
        total = term if total is None else total + term
    return simplify(total) if total is not None else ZERO


def metric_second_partials(field: MetricField):
    """d2g[m][k][i][j] = ∂ₘ∂ₖ g_ij, compiled."""

    def build():
        n = field.dimension
        dg = field.metric_partials
        return tuple(
            tuple(
                tuple(tuple(compile_expr(differentiate(dg[k][i][j], m)) for j in range(n)) for i in range(n))
                for k in range(n)
            )
            for m in range(n)
        )

    return field.cached("metric_second_partials", build)


def christoffel_exprs(field: MetricField) -> Optional[tuple]:
    """Symbolic Γᵏᵢⱼ as exprs[k][i][j], or None above the symbolic size limit."""
    n = field.dimension
    if n > settings.symbolic_christoffel_max_dim:
        return None

    def build():
        g = field.components
        dg = field.metric_partials
        det = symbolic_determinant(g)
        g_inv = [[ZERO] * n for _ in range(n)]
        for k in range(n):
            for l in range(k, n):
                minor = [[g[r][c] for c in range(n) if c != k] for r in range(n) if r != l]
                cofactor = symbolic_determinant(minor) if minor else Const(1.0)
                if (k + l) % 2:
                    cofactor = -cofactor
                g_inv[k][l] = g_inv[l][k] = simplify(cofactor / det)
        first = [
            [[simplify(Const(0.5) * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])) for j in range(n)] for i in range(n)]
            for l in range(n)
        ]
        exprs = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    term = _sum(g_inv[k][l] * first[l][i][j] for l in range(n) if not is_const(first[l][i][j], 0.0))
                    exprs[k][i][j] = exprs[k][j][i] = term
        return tuple(tuple(tuple(row) for row in plane) for plane in exprs)

    return field.cached("christoffel_exprs", build)


def _compiled_christoffel_partials(field: MetricField):
    exprs = christoffel_exprs(field)
    if exprs is None:
        return None

    def build():
        n = field.dimension
        compiled = tuple(
            tuple(
                tuple(tuple(compile_expr(differentiate(exprs[k][i][j], m)) for j in range(n)) for i in range(n))
                for k in range(n)
            )
            for m in range(n)
        )
        logger.debug(f"Compiled symbolic ∂Γ for '{field.name}' ({n ** 4} entries)")
        return compiled

    return field.cached("christoffel_partials", build)


def christoffel_partials_identity(field: MetricField, p: "ChartPoint | PointLike") -> np.ndarray:
    """dG[m, k, i, j] = ∂ₘΓᵏᵢⱼ from ∂g, ∂²g and ∂g⁻¹ = −g⁻¹ ∂g g⁻¹."""
    metric = metric_at(field, p)
    coords = metric.point.coordinates
    g_inv = metric.g_inv
    dg = metric_partials_at(field, coords)
    d2g = np.array([[evaluate_grid(grid, coords) for grid in plane] for plane in metric_second_partials(field)])
    first = 0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)
    # dfirst[m, l, i, j] = ∂ₘ Γ_lij
    dfirst = 0.5 * (d2g.transpose(0, 3, 1, 2) + d2g.transpose(0, 3, 2, 1) - d2g)
    dg_inv = -np.einsum("ka,mab,bl->mkl", g_inv, dg, g_inv)
    dG = np.einsum("mkl,lij->mkij", dg_inv, first) + np.einsum("kl,mlij->mkij", g_inv, dfirst)
    return 0.5 * (dG + dG.transpose(0, 1, 3, 2))


def christoffel_partials_at(field: MetricField, p: "ChartPoint | PointLike") -> np.ndarray:
    """dG[m, k, i, j] = ∂ₘΓᵏᵢⱼ at p."""
    compiled = _compiled_christoffel_partials(field)
    if compiled is None:
        return christoffel_partials_identity(field, p)
    coords = metric_at(field, p).point.coordinates
    return np.array([[evaluate_grid(grid, coords) for grid in plane] for plane in compiled])


def riemann_from(gamma: np.ndarray, dG: np.ndarray) -> np.ndarray:
    """Rⁱⱼₖₗ from Γ and dG[m, i, a, b] = ∂ₘΓⁱₐᵦ."""
    return (
        np.einsum("kilj->ijkl", dG)
        - np.einsum("likj->ijkl", dG)
        + np.einsum("ikm,mlj->ijkl", gamma, gamma)
        - np.einsum("ilm,mkj->ijkl", gamma, gamma)
    )


def curvature_from(gamma: np.ndarray, dG: np.ndarray, g_inv: np.ndarray, point: ChartPoint) -> CurvatureBundle:
    riemann = riemann_from(gamma, dG)
    ricci = np.einsum("ijil->jl", riemann)
    scalar = float(np.einsum("jl,jl->", g_inv, ricci))
    return CurvatureBundle(riemann=riemann, ricci=ricci, scalar=scalar, point=point)


def curvature_at(field: MetricField, p: "ChartPoint | PointLike") -> CurvatureBundle:
    """Riemann tensor, Ricci tensor and scalar curvature at p.

    Raises:
        ChartDomainError: p outside the chart
        DegenerateMetricError: metric not positive definite at p
    """
    ch = christoffel_at(field, p)
    dG = christoffel_partials_at(field, ch.point)
    return curvature_from(ch.gamma, dG, ch.metric.g_inv, ch.point)


def scalar_curvature(field: MetricField, p: "ChartPoint | PointLike") -> float:
    return curvature_at(field, p).scalar


def w_r_from_metric_rate(g, g_dot) -> float:
    """w⁽ʳ⁾ = ½ g^{im} ġ_im = ½ tr(g⁻¹ ġ).

    Raises:
        DegenerateMetricError: g not positive definite
    """
    g = np.asarray(g, dtype=float)
    g_dot = np.asarray(g_dot, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatchError(g.shape[0] if g.ndim else 0, g.shape[-1] if g.ndim else 0, "metric matrix")
    if g_dot.shape != g.shape:
        raise DimensionMismatchError(g.shape[0], g_dot.shape[0] if g_dot.ndim else 0, "metric rate")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError([], "metric matrix is not positive definite") from None
    return 0.5 * float(np.trace(np.linalg.solve(g, g_dot)))


def metric_rate_along(field: MetricField, p: "ChartPoint | PointLike", v: "TangentVector | PointLike") -> np.ndarray:
    """ġ_ij = ∂ₖ g_ij vᵏ, the rate of change of the metric along a curve with velocity v."""
    point = metric_at(field, p).point
    components = as_vector(field, v).as_array()
    return np.einsum("kij,k->ij", metric_partials_at(field, point), components)


def identity_chain_residual(field: MetricField, p: "ChartPoint | PointLike", v: "TangentVector | PointLike") -> float:
    """Largest disagreement among tr W, A·v and ½ tr(g⁻¹ ġ) at one (p, v).

    All three reduce to ½ tr(g⁻¹ ∂g) contracted with v; the first two come
    from the geodesic context, the last from the metric-evolution context.
    """
    ch = christoffel_at(field, p)
    W = geospin_matrix(ch, as_vector(field, v))
    flow_rate = w_r_from_metric_rate(ch.metric.g, metric_rate_along(field, ch.point, v))
    values = (W.trace_w, W.a_dot_v, flow_rate)
    return max(abs(a - b) for a in values for b in values)


def einstein_constant_at(field: MetricField, p: "ChartPoint | PointLike") -> tuple[float, float]:
    """(ρ, ‖Ric − ρg‖_max) with ρ = R/n at one point."""
    bundle = curvature_at(field, p)
    g = metric_at(field, bundle.point).g
    rho = bundle.scalar / field.dimension
    return rho, float(np.max(np.abs(bundle.ricci - rho * g)))


def is_einstein(field: MetricField, points: Sequence["ChartPoint | PointLike"], tol: float = 1e-8) -> Optional[float]:
    """The Einstein constant ρ if Ric = ρg at every point with one ρ, else None.

    In two dimensions Ric = (R/2)g holds at every point, so a constant ρ
    across the sample points is what separates the homothetic families.
    """
    rhos = []
    for p in points:
        rho, defect = einstein_constant_at(field, p)
        if defect > tol * (1.0 + abs(rho)):
            return None
        rhos.append(rho)
    if not rhos:
        return None
    if max(rhos) - min(rhos) > tol * (1.0 + max(abs(r) for r in rhos)):
        return None
    return float(np.mean(rhos))
