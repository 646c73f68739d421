"""Riemannian metrics on a single coordinate chart.

A MetricField holds the symbolic components g_ij over named coordinates, the
open-set constraints describing the chart domain, and a sampling box used to
draw deterministic random points inside that domain. Everything derived from
the symbolic components (partials, determinant, compiled closures) is built
lazily and cached on the field.

Positive definiteness is checked where the metric is evaluated, never
globally: for arbitrary expressions a global check is undecidable.
"""

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Sequence

import numpy as np
from loguru import logger

from geospin.core.config import settings
from geospin.core.errors import (
    ChartDomainError,
    DegenerateMetricError,
    DimensionMismatchError,
    EvaluationDomainError,
    InvalidParameterError,
)
from geospin.expr import (
    Const,
    Expr,
    compile_expr,
    differentiate,
    node_count,
    parse_expr,
    simplify,
    unparse,
    validate_coordinates,
)
from geospin.expr.nodes import ZERO, Unary, is_const, max_coord_index

PointLike = Sequence[float]


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates xⁱ of a point on the chart."""

    coordinates: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(c) for c in self.coordinates)
        if not coords:
            raise InvalidParameterError("point", coords, "needs at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise InvalidParameterError("point", coords, "coordinates must be finite")
        object.__setattr__(self, "coordinates", coords)

    def __len__(self) -> int:
        return len(self.coordinates)

    def __iter__(self):
        return iter(self.coordinates)

    def __getitem__(self, index: int) -> float:
        return self.coordinates[index]

    def as_array(self) -> np.ndarray:
        return np.array(self.coordinates, dtype=float)


class IndexPosition(str, Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector components, contravariant (vⁱ) or covariant (vᵢ)."""

    components: tuple[float, ...]
    index_position: IndexPosition = IndexPosition.UPPER

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))
        object.__setattr__(self, "index_position", IndexPosition(self.index_position))

    def __len__(self) -> int:
        return len(self.components)

    def as_array(self) -> np.ndarray:
        return np.array(self.components, dtype=float)

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(tuple(factor * c for c in self.components), self.index_position)


_RELATION_SPLIT = re.compile(r"(<|>)")


@dataclass(frozen=True)
class DomainConstraint:
    """Strict inequality chain such as "0 < theta < pi" or "x^2 + y^2 < 1".

    `bounds` holds (smaller, larger) expression pairs; the point is inside
    the chart iff every smaller < larger. A side that cannot be evaluated
    counts as outside.
    """

    text: str
    bounds: tuple[tuple[Expr, Expr], ...]

    @classmethod
    def parse(cls, text: str, coords: Sequence[str]) -> "DomainConstraint":
        if "=" in text:
            raise InvalidParameterError("domain", text, "only strict inequalities describe an open chart")
        parts = _RELATION_SPLIT.split(text)
        if len(parts) < 3:
            raise InvalidParameterError("domain", text, "expected a '<' or '>' relation")
        sides = [parse_expr(part.strip(), coords) for part in parts[0::2]]
        relations = parts[1::2]
        bounds = []
        for rel, lhs, rhs in zip(relations, sides, sides[1:]):
            bounds.append((lhs, rhs) if rel == "<" else (rhs, lhs))
        return cls(text=text.strip(), bounds=tuple(bounds))

    def __post_init__(self) -> None:
        compiled = tuple((compile_expr(a), compile_expr(b)) for a, b in self.bounds)
        object.__setattr__(self, "_compiled", compiled)

    def __getstate__(self) -> dict[str, Any]:
        return {"text": self.text, "bounds": self.bounds}

    def __setstate__(self, state: dict[str, Any]) -> None:
        object.__setattr__(self, "text", state["text"])
        object.__setattr__(self, "bounds", state["bounds"])
        self.__post_init__()

    def contains(self, point: PointLike) -> bool:
        try:
            return all(lo(point) < hi(point) for lo, hi in self._compiled)
        except EvaluationDomainError:
            return False


@dataclass(frozen=True, eq=False)
class MetricAtPoint:
    """The metric evaluated at one chart point."""

    g: np.ndarray
    g_inv: np.ndarray
    det: float
    log_sqrt_det: float
    point: ChartPoint


@dataclass(frozen=True, eq=False)
class MetricField:
    """A Riemannian metric g_ij on one coordinate chart.

    Attributes:
        name: Identifier used in reports and manifests
        coordinates: Coordinate names; position is the coordinate index
        components: n×n grid of expressions, symmetric as ASTs
        domain: Open-set constraints of the chart
        sample_box: Per-coordinate (low, high) box for random in-domain points
    """

    name: str
    coordinates: tuple[str, ...]
    components: tuple[tuple[Expr, ...], ...]
    domain: tuple[DomainConstraint, ...] = ()
    sample_box: Optional[tuple[tuple[float, float], ...]] = None
    _cache: dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.coordinates)
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "components", tuple(tuple(row) for row in self.components))
        object.__setattr__(self, "domain", tuple(self.domain))
        if n < 1:
            raise InvalidParameterError("dimension", n, "must be at least 1")
        if n > settings.max_dimension:
            raise InvalidParameterError("dimension", n, f"at most {settings.max_dimension} supported")
        validate_coordinates(self.coordinates)
        if len(self.components) != n or any(len(row) != n for row in self.components):
            raise DimensionMismatchError(n, len(self.components), "metric component grid")
        for i in range(n):
            for j in range(n):
                if max_coord_index(self.components[i][j]) >= n:
                    raise InvalidParameterError(f"g[{i}][{j}]", unparse(self.components[i][j]), "references an undeclared coordinate")
                if j > i and self.components[i][j] != self.components[j][i]:
                    raise InvalidParameterError(
                        f"g[{i}][{j}]",
                        unparse(self.components[i][j]),
                        f"differs from g[{j}][{i}] = {unparse(self.components[j][i])}",
                    )
        if self.sample_box is None:
            object.__setattr__(self, "sample_box", tuple((-1.0, 1.0) for _ in range(n)))
        else:
            box = tuple((float(lo), float(hi)) for lo, hi in self.sample_box)
            if len(box) != n:
                raise DimensionMismatchError(n, len(box), "sample box")
            if any(not lo < hi for lo, hi in box):
                raise InvalidParameterError("sample_box", box, "each interval needs low < high")
            object.__setattr__(self, "sample_box", box)

    def __getstate__(self) -> dict[str, Any]:
        # Compiled closures are not picklable; workers rebuild them lazily.
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state

    def __setstate__(self, state: dict[str, Any]) -> None:
        self.__dict__.update(state)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def cached(self, key: str, build: Callable[[], Any]) -> Any:
        """Memoize a derived quantity on this field."""
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @classmethod
    def from_strings(
        cls,
        name: str,
        coordinates: Sequence[str],
        metric: Sequence[Sequence[str]],
        domain: Sequence[str] = (),
        sample_box: Optional[Sequence[Sequence[float]]] = None,
    ) -> "MetricField":
        """Build a field from expression text, sharing one AST per symmetric pair."""
        coords = tuple(coordinates)
        validate_coordinates(coords)
        n = len(coords)
        if len(metric) != n or any(len(row) != n for row in metric):
            raise DimensionMismatchError(n, len(metric), "metric component grid")
        grid: list[list[Expr]] = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                upper = parse_expr(metric[i][j], coords)
                if j > i:
                    lower = parse_expr(metric[j][i], coords)
                    if upper != lower:
                        raise InvalidParameterError(
                            f"metric[{i}][{j}]", metric[i][j], f"differs from metric[{j}][{i}] = {metric[j][i]!r}"
                        )
                grid[i][j] = grid[j][i] = upper
        constraints = tuple(DomainConstraint.parse(text, coords) for text in domain)
        box = None if sample_box is None else tuple((lo, hi) for lo, hi in sample_box)
        return cls(name=name, coordinates=coords, components=tuple(map(tuple, grid)), domain=constraints, sample_box=box)

    def scaled(self, c: float) -> "MetricField":
        """The homothetic metric c·g on the same chart."""
        if not (c > 0 and math.isfinite(c)):
            raise InvalidParameterError("scale", c, "must be positive and finite")
        n = self.dimension
        grid: list[list[Expr]] = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                grid[i][j] = grid[j][i] = simplify(Const(c) * self.components[i][j])
        return MetricField(
            name=self.name,
            coordinates=self.coordinates,
            components=tuple(map(tuple, grid)),
            domain=self.domain,
            sample_box=self.sample_box,
        )

    # Symbolic and compiled derived quantities

    @property
    def compiled_metric(self) -> tuple[tuple[Callable, ...], ...]:
        return self.cached(
            "compiled_metric",
            lambda: tuple(tuple(compile_expr(e) for e in row) for row in self.components),
        )

    @property
    def metric_partials(self) -> tuple[tuple[tuple[Expr, ...], ...], ...]:
        """dg[k][i][j] = ∂ₖ g_ij, exact."""
        return self.cached("metric_partials", self._build_metric_partials)

    @property
    def compiled_metric_partials(self) -> tuple[tuple[tuple[Callable, ...], ...], ...]:
        return self.cached(
            "compiled_metric_partials",
            lambda: tuple(tuple(tuple(compile_expr(e) for e in row) for row in grid) for grid in self.metric_partials),
        )

    @property
    def det_expr(self) -> Optional[Expr]:
        """Symbolic det g by memoized Laplace expansion, None above the size limit."""
        if self.dimension > settings.symbolic_det_max_dim:
            return None
        return self.cached("det_expr", lambda: symbolic_determinant(self.components))

    def _build_metric_partials(self):
        n = self.dimension
        partials = []
        for k in range(n):
            grid: list[list[Expr]] = [[ZERO] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    grid[i][j] = grid[j][i] = differentiate(self.components[i][j], k)
            partials.append(tuple(map(tuple, grid)))
        logger.debug(
            f"Differentiated metric '{self.name}': "
            f"{sum(node_count(e) for grid in partials for row in grid for e in row)} nodes in ∂g"
        )
        return tuple(partials)


def symbolic_determinant(matrix: Sequence[Sequence[Expr]]) -> Expr:
    """Determinant of an expression matrix by Laplace expansion along rows.

    Minors are memoized on their column set so the cost is n·2ⁿ products
    instead of n!; zero entries are skipped, so diagonal metrics give a plain
    product.
    """
    n = len(matrix)
    memo: dict[tuple[int, frozenset[int]], Expr] = {}

    def minor(row: int, cols: frozenset[int]) -> Expr:
        if row == n:
            return Const(1.0)
        key = (row, cols)
        if key in memo:
            return memo[key]
        total: Optional[Expr] = None
        ordered = sorted(cols)
        for position, col in enumerate(ordered):
            entry = matrix[row][col]
            if is_const(entry, 0.0):
                continue
            rest = minor(row + 1, cols - {col})
            if is_const(rest, 0.0):
                continue
            term = simplify(entry * rest)
            if total is None:
                total = term if position % 2 == 0 else simplify(Unary("neg", term))
            elif position % 2 == 0:
                total = total + term
            else:
                total = total - term
        result = simplify(total) if total is not None else ZERO
        memo[key] = result
        return result

    return minor(0, frozenset(range(n)))


def as_point(metric: MetricField, p: "ChartPoint | PointLike") -> ChartPoint:
    point = p if isinstance(p, ChartPoint) else ChartPoint(tuple(p))
    if len(point) != metric.dimension:
        raise DimensionMismatchError(metric.dimension, len(point), "chart point")
    return point


def as_vector(
    metric: MetricField,
    v: "TangentVector | PointLike",
    position: IndexPosition = IndexPosition.UPPER,
) -> TangentVector:
    """Coerce to a TangentVector with the expected index position."""
    vector = v if isinstance(v, TangentVector) else TangentVector(tuple(v), position)
    if len(vector) != metric.dimension:
        raise DimensionMismatchError(metric.dimension, len(vector), "tangent vector")
    if vector.index_position != position:
        raise InvalidParameterError("index_position", vector.index_position.value, f"expected {position.value}")
    if not all(math.isfinite(c) for c in vector.components):
        raise InvalidParameterError("vector", vector.components, "components must be finite")
    return vector


def in_domain(metric: MetricField, p: "ChartPoint | PointLike") -> bool:
    point = as_point(metric, p)
    return all(c.contains(point.coordinates) for c in metric.domain)


def check_domain(metric: MetricField, p: "ChartPoint | PointLike") -> ChartPoint:
    """Return the point, raising ChartDomainError on the first violated constraint."""
    point = as_point(metric, p)
    for constraint in metric.domain:
        if not constraint.contains(point.coordinates):
            raise ChartDomainError(point.coordinates, constraint.text)
    return point


def evaluate_grid(compiled: Sequence[Sequence[Callable]], point: PointLike) -> np.ndarray:
    return np.array([[fn(point) for fn in row] for row in compiled], dtype=float)


def metric_at(metric: MetricField, p: "ChartPoint | PointLike") -> MetricAtPoint:
    """Evaluate g, g⁻¹, det g and ln√det g at a chart point.

    Raises:
        ChartDomainError: Point outside the chart
        DegenerateMetricError: Evaluated matrix not symmetric positive definite
    """
    point = check_domain(metric, p)
    g = evaluate_grid(metric.compiled_metric, point.coordinates)
    if not np.all(np.isfinite(g)):
        raise DegenerateMetricError(point.coordinates, "metric has nonfinite entries")
    # Cholesky succeeds exactly when every leading principal minor is positive
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(point.coordinates) from None
    g_inv = np.linalg.inv(g)
    det = float(np.linalg.det(g))
    if not det > 0.0:
        raise DegenerateMetricError(point.coordinates, f"determinant {det!r} is not positive")
    return MetricAtPoint(g=g, g_inv=g_inv, det=det, log_sqrt_det=0.5 * math.log(det), point=point)


def inner_product(
    metric: MetricField,
    p: "ChartPoint | PointLike",
    v: "TangentVector | PointLike",
    c: "TangentVector | PointLike",
) -> float:
    """⟨v, c⟩ = g_ij vⁱ cʲ for upper-index vectors."""
    a = as_vector(metric, v).as_array()
    b = as_vector(metric, c).as_array()
    g = metric_at(metric, p).g
    return float(a @ g @ b)


def norm(metric: MetricField, p: "ChartPoint | PointLike", v: "TangentVector | PointLike") -> float:
    """‖v‖ = ⟨v, v⟩^½."""
    return math.sqrt(max(inner_product(metric, p, v, v), 0.0))


def lower_index(metric: MetricField, p: "ChartPoint | PointLike", v: "TangentVector | PointLike") -> TangentVector:
    """v_j = g_ij vⁱ."""
    upper = as_vector(metric, v, IndexPosition.UPPER).as_array()
    g = metric_at(metric, p).g
    return TangentVector(tuple(g @ upper), IndexPosition.LOWER)


def raise_index(metric: MetricField, p: "ChartPoint | PointLike", v: "TangentVector | PointLike") -> TangentVector:
    """vⁱ = g^ij v_j."""
    lower = as_vector(metric, v, IndexPosition.LOWER).as_array()
    g_inv = metric_at(metric, p).g_inv
    return TangentVector(tuple(g_inv @ lower), IndexPosition.UPPER)


def sample_point(metric: MetricField, rng: np.random.Generator) -> ChartPoint:
    """Draw a point uniformly from the sampling box, rejecting out-of-domain
    and degenerate points."""
    lows = np.array([lo for lo, _ in metric.sample_box])
    highs = np.array([hi for _, hi in metric.sample_box])
    for _ in range(settings.domain_sampling_attempts):
        candidate = ChartPoint(tuple(rng.uniform(lows, highs)))
        if not in_domain(metric, candidate):
            continue
        try:
            metric_at(metric, candidate)
        except (DegenerateMetricError, EvaluationDomainError):
            continue
        return candidate
    raise InvalidParameterError(
        "sample_box", metric.sample_box, f"no in-domain point found in {settings.domain_sampling_attempts} draws"
    )


def sample_near(
    metric: MetricField, p: "ChartPoint | PointLike", rng: np.random.Generator, radius: float = 0.1
) -> ChartPoint:
    """Draw an in-domain point within radius·max(1, |pᵢ|) of p per coordinate.

    The window halves after every hundred rejected draws so points close to a
    domain boundary still find neighbours.
    """
    center = np.asarray(as_point(metric, p).coordinates, dtype=float)
    half_width = radius * np.maximum(1.0, np.abs(center))
    for attempt in range(settings.domain_sampling_attempts):
        if attempt and attempt % 100 == 0:
            half_width = half_width / 2.0
        candidate = ChartPoint(tuple(center + rng.uniform(-half_width, half_width)))
        if not in_domain(metric, candidate):
            continue
        try:
            metric_at(metric, candidate)
        except (DegenerateMetricError, EvaluationDomainError):
            continue
        return candidate
    raise InvalidParameterError(
        "point", tuple(center), f"no in-domain neighbour found in {settings.domain_sampling_attempts} draws"
    )


def sample_vector(metric: MetricField, rng: np.random.Generator, scale: float = 1.0) -> TangentVector:
    """Standard normal components times `scale`."""
    return TangentVector(tuple(scale * rng.standard_normal(metric.dimension)))
