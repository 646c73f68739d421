"""Expression AST for metric components.

Nodes are immutable frozen dataclasses. A tree is one of:

- Const: a real constant
- Coord: a reference to chart coordinate `index` (the name is kept for printing)
- Unary: neg, sin, cos, sinh, cosh, exp, ln, sqrt applied to one child
- Binary: add, sub, mul, div, pow over two children; the exponent of pow is
  always a Const so that derivatives stay closed-form

Arithmetic operators are overloaded so ASTs can be assembled in Python code
(`g * 0.5 + x ** 2`), which is how the connection and curvature modules build
their symbolic grids.
"""

from dataclasses import dataclass
from typing import Iterator, Union

UNARY_OPS = ("neg", "sin", "cos", "sinh", "cosh", "exp", "ln", "sqrt")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

# Printing precedence, higher binds tighter
_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM = 5

Number = Union[int, float]


class Expr:
    """Base class for expression nodes."""

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    def __add__(self, other: "Expr | Number") -> "Expr":
        return Binary("add", self, as_expr(other))

    def __radd__(self, other: Number) -> "Expr":
        return Binary("add", as_expr(other), self)

    def __sub__(self, other: "Expr | Number") -> "Expr":
        return Binary("sub", self, as_expr(other))

    def __rsub__(self, other: Number) -> "Expr":
        return Binary("sub", as_expr(other), self)

    def __mul__(self, other: "Expr | Number") -> "Expr":
        return Binary("mul", self, as_expr(other))

    def __rmul__(self, other: Number) -> "Expr":
        return Binary("mul", as_expr(other), self)

    def __truediv__(self, other: "Expr | Number") -> "Expr":
        return Binary("div", self, as_expr(other))

    def __rtruediv__(self, other: Number) -> "Expr":
        return Binary("div", as_expr(other), self)

    def __pow__(self, other: "Const | Number") -> "Expr":
        return Binary("pow", self, as_expr(other))

    def __neg__(self) -> "Expr":
        return Unary("neg", self)

    def __str__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Coord(Expr):
    index: int
    name: str

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"Coordinate index must be non-negative, got {self.index}")


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise ValueError(f"Unknown unary op '{self.op}'")

    @property
    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise ValueError(f"Unknown binary op '{self.op}'")
        if self.op == "pow" and not isinstance(self.right, Const):
            raise ValueError("pow exponent must be a constant")

    @property
    def children(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(value: "Expr | Number") -> Expr:
    """Wrap plain numbers as Const nodes."""
    if isinstance(value, Expr):
        return value
    return Const(float(value))


def is_const(e: Expr, value: float | None = None) -> bool:
    """True for a Const node, optionally with the given value."""
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_count(e: Expr) -> int:
    return sum(1 for _ in walk(e))


def max_coord_index(e: Expr) -> int:
    """Largest coordinate index referenced, -1 for constant trees."""
    return max((n.index for n in walk(e) if isinstance(n, Coord)), default=-1)


def depends_on(e: Expr, coord_index: int) -> bool:
    """Whether the tree references coordinate `coord_index`."""
    return any(isinstance(n, Coord) and n.index == coord_index for n in walk(e))


def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _precedence(e: Expr) -> int:
    if isinstance(e, Const):
        return _PRECEDENCE["neg"] if e.value < 0 else _ATOM
    if isinstance(e, Unary):
        return _PRECEDENCE["neg"] if e.op == "neg" else _ATOM
    if isinstance(e, Binary):
        return _PRECEDENCE[e.op]
    return _ATOM


def _wrap(e: Expr, needs_parens: bool) -> str:
    text = unparse(e)
    return f"({text})" if needs_parens else text


def unparse(e: Expr) -> str:
    """Render an AST as text accepted by `parse_expr` with the same coordinates."""
    if isinstance(e, Const):
        return _format_number(e.value)
    if isinstance(e, Coord):
        return e.name
    if isinstance(e, Unary):
        if e.op == "neg":
            return "-" + _wrap(e.arg, _precedence(e.arg) <= _PRECEDENCE["neg"])
        return f"{e.op}({unparse(e.arg)})"
    if isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        symbol = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}[e.op]
        if e.op == "pow":
            base = _wrap(e.left, _precedence(e.left) != _ATOM)
            exponent = _wrap(e.right, _precedence(e.right) != _ATOM)
            return f"{base}^{exponent}"
        left = _wrap(e.left, _precedence(e.left) < prec)
        # sub and div are left-associative, so an equal-precedence right operand needs parens
        strict = e.op in ("sub", "div")
        right_prec = _precedence(e.right)
        right = _wrap(e.right, right_prec < prec or (strict and right_prec == prec))
        return f"{left} {symbol} {right}" if prec == 1 else f"{left}{symbol}{right}"
    raise TypeError(f"Not an expression node: {e!r}")
