"""Numeric evaluation of expression trees.

`evaluate` walks the tree and reports domain failures with the path of the
offending node. `compile_expr` builds a tree of closures once and is what the
geometry modules call in their inner loops; on any arithmetic failure it
re-runs `evaluate` so the error still carries its location.
"""

import math
from typing import Callable, Sequence

from geospin.core.errors import DimensionMismatchError, EvaluationDomainError
from geospin.expr.nodes import Binary, Const, Coord, Expr, Unary, max_coord_index, unparse

CompiledExpr = Callable[[Sequence[float]], float]


def _apply_unary(op: str, a: float) -> float:
    if op == "neg":
        return -a
    if op == "ln":
        if a <= 0.0:
            raise ValueError("ln of non-positive value")
        return math.log(a)
    if op == "sqrt":
        if a < 0.0:
            raise ValueError("sqrt of negative value")
        return math.sqrt(a)
    return _UNARY[op](a)


def _apply_binary(op: str, a: float, b: float) -> float:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0.0:
            raise ZeroDivisionError("division by zero")
        return a / b
    return math.pow(a, b)


_UNARY = {
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "exp": math.exp,
}


def _check_dimension(e: Expr, point: Sequence[float]) -> None:
    needed = max_coord_index(e) + 1
    if needed > len(point):
        raise DimensionMismatchError(needed, len(point), "evaluation point")


def _eval(e: Expr, point: Sequence[float], path: tuple[int, ...]) -> float:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Coord):
        return float(point[e.index])
    if isinstance(e, Unary):
        a = _eval(e.arg, point, path + (0,))
        try:
            return _apply_unary(e.op, a)
        except (ValueError, OverflowError) as exc:
            raise EvaluationDomainError(str(exc), unparse(e), path) from exc
    if isinstance(e, Binary):
        a = _eval(e.left, point, path + (0,))
        b = _eval(e.right, point, path + (1,))
        try:
            return _apply_binary(e.op, a, b)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            reason = str(exc) if e.op != "pow" else f"pow domain error ({exc})"
            raise EvaluationDomainError(reason, unparse(e), path) from exc
    raise TypeError(f"Not an expression node: {e!r}")


def evaluate(e: Expr, point: Sequence[float]) -> float:
    """Evaluate `e` at a chart point in IEEE double precision.

    Args:
        e: Expression tree
        point: Coordinate values; must cover every coordinate the tree uses

    Returns:
        The value as a float

    Raises:
        DimensionMismatchError: Point shorter than the coordinates referenced
        EvaluationDomainError: ln of a non-positive value, sqrt of a negative
            value or division by zero; `path` lists child indices from the root
    """
    _check_dimension(e, point)
    return _eval(e, point, ())


def _build(e: Expr) -> CompiledExpr:
    if isinstance(e, Const):
        value = e.value
        return lambda p: value
    if isinstance(e, Coord):
        index = e.index
        return lambda p: p[index]
    if isinstance(e, Unary):
        arg = _build(e.arg)
        if e.op == "neg":
            return lambda p: -arg(p)
        if e.op in _UNARY:
            fn = _UNARY[e.op]
            return lambda p: fn(arg(p))
        fn = math.log if e.op == "ln" else math.sqrt
        return lambda p: fn(arg(p))
    if isinstance(e, Binary):
        left = _build(e.left)
        right = _build(e.right)
        if e.op == "add":
            return lambda p: left(p) + right(p)
        if e.op == "sub":
            return lambda p: left(p) - right(p)
        if e.op == "mul":
            return lambda p: left(p) * right(p)
        if e.op == "div":
            return lambda p: left(p) / right(p)
        exponent = e.right.value
        return lambda p: math.pow(left(p), exponent)
    raise TypeError(f"Not an expression node: {e!r}")


def compile_expr(e: Expr) -> CompiledExpr:
    """Compile `e` into a callable taking a coordinate sequence.

    The callable gives the same values as `evaluate` and raises the same
    located `EvaluationDomainError` on domain failures.
    """
    fast = _build(e)
    needed = max_coord_index(e) + 1

    def run(point: Sequence[float]) -> float:
        if needed > len(point):
            raise DimensionMismatchError(needed, len(point), "evaluation point")
        try:
            return fast(point)
        except (ValueError, ZeroDivisionError, OverflowError):
            return evaluate(e, point)

    return run
