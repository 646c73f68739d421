"""Built-in manifolds.

Each entry is a builder taking keyword parameters and returning a MetricField
with its chart domain and a sampling box that stays clear of chart
singularities.
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from geospin.core.errors import InvalidParameterError, UnknownManifoldError
from geospin.expr import parse_expr
from geospin.geometry.manifold import MetricField


@dataclass(frozen=True)
class ZooEntry:
    name: str
    description: str
    parameters: dict[str, Any]  # name -> default
    dimension: Callable[[Mapping[str, Any]], int]
    build: Callable[..., MetricField]


def _euclidean_coords(n: int) -> list[str]:
    return ["x", "y", "z"][:n] if n <= 3 else [f"x{i + 1}" for i in range(n)]


def _identity(n: int) -> list[list[str]]:
    return [["1" if i == j else "0" for j in range(n)] for i in range(n)]


def _dimension_param(n: Any) -> int:
    if isinstance(n, float) and n.is_integer():
        n = int(n)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameterError("n", n, "dimension must be a positive integer")
    return n


def euclidean(n: int = 2) -> MetricField:
    n = _dimension_param(n)
    return MetricField.from_strings(
        name="euclidean",
        coordinates=_euclidean_coords(n),
        metric=_identity(n),
        sample_box=[(-2.0, 2.0)] * n,
    )


def sphere(radius: float = 1.0) -> MetricField:
    radius = float(radius)
    if not (radius > 0 and math.isfinite(radius)):
        raise InvalidParameterError("radius", radius, "must be positive")
    r2 = repr(radius * radius)
    return MetricField.from_strings(
        name="sphere",
        coordinates=["theta", "phi"],
        metric=[[r2, "0"], ["0", f"{r2}*sin(theta)^2"]],
        domain=["0 < theta < pi"],
        sample_box=[(0.3, math.pi - 0.3), (0.0, 2.0 * math.pi)],
    )


def poincare_half_plane() -> MetricField:
    return MetricField.from_strings(
        name="poincare_half_plane",
        coordinates=["x", "y"],
        metric=[["1/y^2", "0"], ["0", "1/y^2"]],
        domain=["y > 0"],
        sample_box=[(-2.0, 2.0), (0.5, 3.0)],
    )


def poincare_disk() -> MetricField:
    conformal = "4/(1 - x^2 - y^2)^2"
    return MetricField.from_strings(
        name="poincare_disk",
        coordinates=["x", "y"],
        metric=[[conformal, "0"], ["0", conformal]],
        domain=["x^2 + y^2 < 1"],
        sample_box=[(-0.6, 0.6), (-0.6, 0.6)],
    )


def flat_torus(n: int = 2) -> MetricField:
    # Unwrapped fundamental domain; periodic identification is not modelled
    n = _dimension_param(n)
    coords = ["theta", "phi"] if n == 2 else [f"t{i + 1}" for i in range(n)]
    return MetricField.from_strings(
        name="flat_torus",
        coordinates=coords,
        metric=_identity(n),
        sample_box=[(0.0, 2.0 * math.pi)] * n,
    )


def warped_product(f: str = "sinh(r)") -> MetricField:
    """dr² + f(r)² dθ²; the default f = sinh r is the hyperbolic plane in polar form."""
    coords = ["r", "theta"]
    parse_expr(f, coords)
    return MetricField.from_strings(
        name="warped_product",
        coordinates=coords,
        metric=[["1", "0"], ["0", f"({f})^2"]],
        domain=["r > 0", f"{f} > 0"],
        sample_box=[(0.3, 2.0), (0.0, 2.0 * math.pi)],
    )


ZOO: dict[str, ZooEntry] = {
    entry.name: entry
    for entry in (
        ZooEntry("euclidean", "flat space R^n", {"n": 2}, lambda p: _dimension_param(p.get("n", 2)), euclidean),
        ZooEntry("sphere", "round 2-sphere of radius r, R = 2/r^2", {"radius": 1.0}, lambda p: 2, sphere),
        ZooEntry("poincare_half_plane", "hyperbolic half-plane, R = -2", {}, lambda p: 2, poincare_half_plane),
        ZooEntry("poincare_disk", "hyperbolic disk, R = -2", {}, lambda p: 2, poincare_disk),
        ZooEntry("flat_torus", "flat n-torus (unwrapped chart)", {"n": 2}, lambda p: _dimension_param(p.get("n", 2)), flat_torus),
        ZooEntry("warped_product", "dr^2 + f(r)^2 dtheta^2", {"f": "sinh(r)"}, lambda p: 2, warped_product),
    )
}


def normalize_name(name: str) -> str:
    return name.strip().lower().replace("-", "_")


def builtin_manifold(name: str, params: Mapping[str, Any] | None = None) -> MetricField:
    """Build a zoo manifold by name ("poincare-half-plane" and "poincare_half_plane" both work).

    Raises:
        UnknownManifoldError: Name not in the zoo
        InvalidParameterError: Unknown parameter or value out of range
    """
    key = normalize_name(name)
    if key not in ZOO:
        raise UnknownManifoldError(name, sorted(ZOO))
    entry = ZOO[key]
    params = dict(params or {})
    unknown = set(params) - set(entry.parameters)
    if unknown:
        raise InvalidParameterError(
            sorted(unknown)[0], params[sorted(unknown)[0]], f"'{key}' accepts {sorted(entry.parameters) or 'no parameters'}"
        )
    return entry.build(**params)


def list_manifolds() -> list[dict[str, Any]]:
    """Zoo listing with default dimension and parameters, sorted by name."""
    return [
        {
            "name": entry.name,
            "dimension": entry.dimension(entry.parameters),
            "parameters": dict(entry.parameters),
            "description": entry.description,
        }
        for entry in sorted(ZOO.values(), key=lambda e: e.name)
    ]
