"""Independent reference computations used by the verification suite and tests.

Nothing here shares code with the exact paths it checks: derivatives are
central finite differences of plain evaluations, the hyperbolic geodesic and
the cubic roots are closed forms.
"""

import cmath
import math
from typing import Sequence

import numpy as np

from geospin.core.config import settings
from geospin.expr import Expr, evaluate
from geospin.geometry.manifold import ChartPoint, MetricField, PointLike, metric_at


def fd_step(x: float, h: float | None = None) -> float:
    """h · max(1, |x|)."""
    return (settings.fd_step if h is None else h) * max(1.0, abs(x))


def fd_partial(e: Expr, p: Sequence[float], k: int, h: float | None = None) -> float:
    """Central difference of an expression along coordinate k."""
    step = fd_step(p[k], h)
    plus = list(p)
    minus = list(p)
    plus[k] += step
    minus[k] -= step
    return (evaluate(e, plus) - evaluate(e, minus)) / (2.0 * step)


def _metric_matrix(field: MetricField, p: Sequence[float]) -> np.ndarray:
    return np.array([[evaluate(e, p) for e in row] for row in field.components])


def fd_metric_partials(field: MetricField, p: Sequence[float], h: float | None = None) -> np.ndarray:
    """dg[k, i, j] ≈ ∂ₖ g_ij by central differences of evaluated metrics."""
    n = field.dimension
    dg = np.zeros((n, n, n))
    for k in range(n):
        step = fd_step(p[k], h)
        plus = list(p)
        minus = list(p)
        plus[k] += step
        minus[k] -= step
        dg[k] = (_metric_matrix(field, plus) - _metric_matrix(field, minus)) / (2.0 * step)
    return dg


def fd_christoffel(field: MetricField, p: "ChartPoint | PointLike", h: float | None = None) -> np.ndarray:
    """Γᵏᵢⱼ from finite-difference metric partials, written out with explicit sums."""
    coords = list(p)
    n = field.dimension
    g_inv = np.linalg.inv(_metric_matrix(field, coords))
    dg = fd_metric_partials(field, coords, h)
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                gamma[k, i, j] = 0.5 * sum(
                    g_inv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j]) for l in range(n)
                )
    return gamma


def fd_scalar_curvature(field: MetricField, p: "ChartPoint | PointLike", h: float = 1e-4) -> float:
    """Scalar curvature with ∂Γ from central differences of `fd_christoffel`.

    The outer step is larger than the inner one, so truncation and rounding
    errors of the nested differences stay balanced.
    """
    coords = list(p)
    n = field.dimension
    gamma = fd_christoffel(field, coords)
    dG = np.zeros((n, n, n, n))
    for m in range(n):
        step = fd_step(coords[m], h)
        plus = list(coords)
        minus = list(coords)
        plus[m] += step
        minus[m] -= step
        dG[m] = (fd_christoffel(field, plus) - fd_christoffel(field, minus)) / (2.0 * step)
    ricci = np.zeros((n, n))
    for j in range(n):
        for l in range(n):
            total = 0.0
            for i in range(n):
                total += dG[i, i, l, j] - dG[l, i, i, j]
                for m in range(n):
                    total += gamma[i, i, m] * gamma[m, l, j] - gamma[i, l, m] * gamma[m, i, j]
            ricci[j, l] = total
    g_inv = metric_at(field, coords).g_inv
    return float(np.sum(g_inv * ricci))


def closed_form_half_plane_geodesic(t: float) -> tuple[float, float, float, float]:
    """Unit-speed hyperbolic geodesic from (0, 1) with velocity (1, 0).

    x = tanh t, y = sech t, the upper unit semicircle.
    Returns (x, y, vx, vy).
    """
    sech = 1.0 / math.cosh(t)
    return math.tanh(t), sech, sech * sech, -sech * math.tanh(t)


def cubic_roots(a: float, b: float, c: float) -> list[complex]:
    """Roots of λ³ + aλ² + bλ + c by Cardano's formula."""
    # depressed cubic μ³ + pμ + q with λ = μ − a/3
    p = b - a * a / 3.0
    q = 2.0 * a ** 3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if abs(p) < 1e-300 and abs(q) < 1e-300:
        return [complex(shift)] * 3
    sq = cmath.sqrt(disc)
    u = (-q / 2.0 + sq) ** (1.0 / 3.0) if abs(-q / 2.0 + sq) >= abs(-q / 2.0 - sq) else (-q / 2.0 - sq) ** (1.0 / 3.0)
    omega = complex(-0.5, math.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        mu = uk - p / (3.0 * uk)
        roots.append(_polish(mu + shift, a, b, c))
    return roots


def _polish(r: complex, a: float, b: float, c: float) -> complex:
    # two Newton steps on the cubic remove the cancellation error of Cardano
    for _ in range(2):
        f = ((r + a) * r + b) * r + c
        df = (3.0 * r + 2.0 * a) * r + b
        if df == 0:
            break
        r -= f / df
    return r


def characteristic_cubic(m: np.ndarray) -> tuple[float, float, float]:
    """(a, b, c) with det(λI − M) = λ³ + aλ² + bλ + c for a 3×3 matrix."""
    tr = float(np.trace(m))
    minors = (
        m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    )
    det = (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    return -tr, float(minors), -float(det)
