"""Exception hierarchy for the toolkit.

Every failure carries the pipeline step it happened in and a details dict, so
the CLI can report it and the verification report can name the offending input.
"""

from typing import Any, Optional, Sequence


class GeometryError(Exception):
    """Base exception for toolkit errors with context."""

    def __init__(self, message: str, step: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.step = step
        self.details = details or {}


# Expressions


class ExprSyntaxError(GeometryError):
    """Malformed expression text."""

    def __init__(self, message: str, position: int, expected: Sequence[str] = ()):
        super().__init__(
            f"{message} at offset {position}",
            step="parse",
            details={"position": position, "expected": list(expected)},
        )
        self.position = position
        self.expected = tuple(expected)


class UnknownIdentifierError(GeometryError):
    """Identifier that is neither a coordinate, a constant nor a function."""

    def __init__(self, name: str, position: int):
        super().__init__(
            f"Unknown identifier '{name}' at offset {position}",
            step="parse",
            details={"name": name, "position": position},
        )
        self.name = name
        self.position = position


class ArityError(GeometryError):
    """Function called with the wrong number of arguments."""

    def __init__(self, name: str, position: int, got: int):
        super().__init__(
            f"Function '{name}' takes 1 argument, got {got} (offset {position})",
            step="parse",
            details={"name": name, "position": position, "got": got},
        )
        self.name = name
        self.position = position
        self.got = got


class EvaluationDomainError(GeometryError):
    """ln of a non-positive value, sqrt of a negative value, division by zero, ..."""

    def __init__(self, reason: str, node_text: str, path: Sequence[int]):
        super().__init__(
            f"{reason} in '{node_text}' (node path {list(path)})",
            step="evaluate",
            details={"reason": reason, "node": node_text, "path": list(path)},
        )
        self.reason = reason
        self.node_text = node_text
        self.path = tuple(path)


# Geometry


class DimensionMismatchError(GeometryError):
    """Vectors, points or matrices with incompatible dimensions."""

    def __init__(self, expected: int, got: int, what: str):
        super().__init__(
            f"Dimension mismatch for {what}: expected {expected}, got {got}",
            step="validate",
            details={"expected": expected, "got": got, "what": what},
        )


class ChartDomainError(GeometryError):
    """Point outside the chart domain (poles, boundaries)."""

    def __init__(self, point: Sequence[float], constraint: str):
        super().__init__(
            f"Point {list(point)} violates chart constraint '{constraint}'",
            step="domain",
            details={"point": list(point), "constraint": constraint},
        )
        self.point = tuple(point)
        self.constraint = constraint


class DegenerateMetricError(GeometryError):
    """Metric not positive definite at the evaluation point."""

    def __init__(self, point: Sequence[float], reason: str = "metric is not positive definite"):
        super().__init__(
            f"Degenerate metric at {list(point)}: {reason}",
            step="metric",
            details={"point": list(point), "reason": reason},
        )
        self.point = tuple(point)


class InvalidParameterError(GeometryError):
    """Parameter outside its admissible range."""

    def __init__(self, name: str, value: Any, reason: str):
        super().__init__(
            f"Invalid parameter {name}={value!r}: {reason}",
            step="validate",
            details={"name": name, "value": value, "reason": reason},
        )


class UnknownManifoldError(GeometryError):
    """Name not present in the built-in zoo."""

    def __init__(self, name: str, known: Sequence[str]):
        super().__init__(
            f"Unknown manifold '{name}'. Known: {', '.join(known)}",
            step="zoo",
            details={"name": name, "known": list(known)},
        )


class ManifestError(GeometryError):
    """Invalid manifold manifest; `entry` names the offending part."""

    def __init__(self, message: str, entry: str):
        super().__init__(f"{message} ({entry})", step="manifest", details={"entry": entry})
        self.entry = entry


# Dynamics


class IntegrationError(GeometryError):
    """Trajectory left the chart domain or became nonfinite.

    `partial` holds the samples accepted before the failure, when available.
    """

    def __init__(self, message: str, last_state: Any, details: Optional[dict[str, Any]] = None, partial: Any = None):
        super().__init__(message, step="integrate", details=details)
        self.last_state = last_state
        self.partial = partial


class GridMisalignmentError(GeometryError):
    """Samples do not line up with the requested step grid."""

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message, step="mode", details=details)


class InsufficientSamplesError(GeometryError):
    """Too few samples for a finite-difference estimate."""

    def __init__(self, needed: int, got: int):
        super().__init__(
            f"Need at least {needed} samples, got {got}",
            step="residual",
            details={"needed": needed, "got": got},
        )


# Spectrum


class ConvergenceError(GeometryError):
    """QR iteration hit its cap before all eigenvalues deflated."""

    def __init__(self, iterations: int, unresolved: int):
        super().__init__(
            f"QR iteration did not converge after {iterations} sweeps "
            f"({unresolved} eigenvalues unresolved)",
            step="eigen",
            details={"iterations": iterations, "unresolved": unresolved},
        )
        self.iterations = iterations
