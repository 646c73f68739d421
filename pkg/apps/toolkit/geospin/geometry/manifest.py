"""Manifold manifest JSON: load user metrics and write them back out.

Format:
    {"name": ..., "dimension": n, "coordinates": [...],
     "metric": [[expr, ...], ...], "domain": [constraint, ...],
     "sample_box": [[low, high], ...]}
"""

import json
from pathlib import Path
from typing import Any

from loguru import logger
from pydantic import ValidationError

from geospin.api.schemas import ManifoldManifest
from geospin.core.errors import GeometryError, ManifestError
from geospin.expr import parse_expr, unparse
from geospin.geometry.manifold import DomainConstraint, MetricField


def _entry_path(loc: tuple[Any, ...]) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path or "manifest"


def parse_manifest(data: Any) -> ManifoldManifest:
    try:
        return ManifoldManifest.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ManifestError(first["msg"], _entry_path(tuple(first["loc"]))) from exc


def field_from_manifest(manifest: ManifoldManifest) -> MetricField:
    """Build a MetricField, naming the offending manifest entry on any failure."""
    n = manifest.dimension
    coords = manifest.coordinates
    if len(coords) != n:
        raise ManifestError(f"expected {n} coordinate names, got {len(coords)}", "coordinates")
    if len(manifest.metric) != n:
        raise ManifestError(f"expected {n} metric rows, got {len(manifest.metric)}", "metric")
    for i, row in enumerate(manifest.metric):
        if len(row) != n:
            raise ManifestError(f"expected {n} entries, got {len(row)}", f"metric[{i}]")

    grid = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            try:
                grid[i][j] = parse_expr(manifest.metric[i][j], coords)
            except GeometryError as exc:
                raise ManifestError(str(exc), f"metric[{i}][{j}]") from exc
    for i in range(n):
        for j in range(i + 1, n):
            if grid[i][j] != grid[j][i]:
                raise ManifestError(
                    f"metric is not symmetric: '{manifest.metric[i][j]}' vs '{manifest.metric[j][i]}'",
                    f"metric[{i}][{j}]",
                )
            grid[j][i] = grid[i][j]

    constraints = []
    for k, text in enumerate(manifest.domain):
        try:
            constraints.append(DomainConstraint.parse(text, coords))
        except GeometryError as exc:
            raise ManifestError(str(exc), f"domain[{k}]") from exc

    try:
        return MetricField(
            name=manifest.name,
            coordinates=tuple(coords),
            components=tuple(tuple(row) for row in grid),
            domain=tuple(constraints),
            sample_box=None if manifest.sample_box is None else tuple(manifest.sample_box),
        )
    except GeometryError as exc:
        raise ManifestError(str(exc), "manifest") from exc


def load_manifest(path: Path | str) -> MetricField:
    """Read and validate a manifest file.

    Raises:
        ManifestError: Unreadable file, invalid JSON or an invalid entry
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest: {exc}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg} at line {exc.lineno}", str(path)) from exc
    field = field_from_manifest(parse_manifest(data))
    logger.debug(f"Loaded manifest '{field.name}' ({field.dimension}D) from {path}")
    return field


def manifest_from_field(field: MetricField) -> ManifoldManifest:
    return ManifoldManifest(
        name=field.name,
        dimension=field.dimension,
        coordinates=list(field.coordinates),
        metric=[[unparse(e) for e in row] for row in field.components],
        domain=[c.text for c in field.domain],
        sample_box=[tuple(b) for b in field.sample_box],
    )


def dump_manifest(field: MetricField, path: Path | str | None = None) -> str:
    """Serialize a field as manifest JSON, optionally writing it to `path`.

    Loading the result reconstructs an evaluation-identical field.
    """
    text = manifest_from_field(field).model_dump_json(indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
