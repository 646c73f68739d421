"""Symbolic differentiation and simplification.

Derivatives are exact: curvature needs second partials of the metric and
finite differences of finite differences lose about half the digits.
Simplification is deliberately shallow (constant folding plus the usual
identities); equality in tests is by evaluation, never by structure.
"""

import math
from functools import singledispatch

from geospin.expr.nodes import ONE, ZERO, Binary, Const, Coord, Expr, Unary, depends_on, is_const

_FOLD_UNARY = {
    "neg": lambda a: -a,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}

_FOLD_BINARY = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "pow": math.pow,
}


def _fold(fn, *args: float) -> Const | None:
    # A constant subtree that cannot be evaluated (ln(0), 1/0) is left in
    # place so that evaluation reports it with its location.
    try:
        value = fn(*args)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    if not math.isfinite(value):
        return None
    return Const(value)


@singledispatch
def simplify(e: Expr) -> Expr:
    """Constant folding and identity elimination, bottom-up."""
    raise TypeError(f"Cannot simplify {e!r}")


@simplify.register
def _(e: Const) -> Expr:
    return e


@simplify.register
def _(e: Coord) -> Expr:
    return e


@simplify.register
def _(e: Unary) -> Expr:
    arg = simplify(e.arg)
    if isinstance(arg, Const):
        folded = _fold(_FOLD_UNARY[e.op], arg.value)
        if folded is not None:
            return folded
    if e.op == "neg" and isinstance(arg, Unary) and arg.op == "neg":
        return arg.arg
    return Unary(e.op, arg)


@simplify.register
def _(e: Binary) -> Expr:
    left = simplify(e.left)
    right = simplify(e.right)
    if isinstance(left, Const) and isinstance(right, Const):
        folded = _fold(_FOLD_BINARY[e.op], left.value, right.value)
        if folded is not None:
            return folded

    if e.op == "add":
        if is_const(left, 0.0):
            return right
        if is_const(right, 0.0):
            return left
    elif e.op == "sub":
        if is_const(right, 0.0):
            return left
        if is_const(left, 0.0):
            return simplify(Unary("neg", right))
    elif e.op == "mul":
        if is_const(left, 0.0) or is_const(right, 0.0):
            return ZERO
        if is_const(left, 1.0):
            return right
        if is_const(right, 1.0):
            return left
        if is_const(left, -1.0):
            return simplify(Unary("neg", right))
        if is_const(right, -1.0):
            return simplify(Unary("neg", left))
    elif e.op == "div":
        if is_const(right, 1.0):
            return left
        # removes a removable singularity at right == 0
        if is_const(left, 0.0):
            return ZERO
    elif e.op == "pow":
        if is_const(right, 1.0):
            return left
        if is_const(right, 0.0):
            return ONE
    return Binary(e.op, left, right)


def _d(e: Expr, k: int) -> Expr:
    if not depends_on(e, k):
        return ZERO
    return _derivative(e, k)


@singledispatch
def _derivative(e: Expr, k: int) -> Expr:
    raise TypeError(f"Cannot differentiate {e!r}")


@_derivative.register
def _(e: Coord, k: int) -> Expr:
    return ONE if e.index == k else ZERO


@_derivative.register
def _(e: Unary, k: int) -> Expr:
    u = e.arg
    du = _d(u, k)
    if e.op == "neg":
        return -du
    if e.op == "sin":
        outer = Unary("cos", u)
    elif e.op == "cos":
        outer = -Unary("sin", u)
    elif e.op == "sinh":
        outer = Unary("cosh", u)
    elif e.op == "cosh":
        outer = Unary("sinh", u)
    elif e.op == "exp":
        outer = e
    elif e.op == "ln":
        return du / u
    elif e.op == "sqrt":
        return du / (Const(2.0) * e)
    else:
        raise TypeError(f"Unknown unary op '{e.op}'")
    return outer * du


@_derivative.register
def _(e: Binary, k: int) -> Expr:
    u, w = e.left, e.right
    if e.op == "add":
        return _d(u, k) + _d(w, k)
    if e.op == "sub":
        return _d(u, k) - _d(w, k)
    if e.op == "mul":
        return _d(u, k) * w + u * _d(w, k)
    if e.op == "div":
        if not depends_on(w, k):
            return _d(u, k) / w
        return (_d(u, k) * w - u * _d(w, k)) / (w ** 2.0)
    if e.op == "pow":
        n = w.value
        return Const(n) * (u ** (n - 1.0)) * _d(u, k)
    raise TypeError(f"Unknown binary op '{e.op}'")


def differentiate(e: Expr, coord_index: int) -> Expr:
    """Exact partial derivative of `e` with respect to coordinate `coord_index`.

    Subtrees that do not reference the coordinate are pruned to zero before
    the chain, product and quotient rules are applied; the result is simplified.
    """
    if coord_index < 0:
        raise ValueError(f"Coordinate index must be non-negative, got {coord_index}")
    return simplify(_d(e, coord_index))
