"""Metric expression language: AST, parser, exact calculus, evaluation."""

from geospin.expr.calculus import differentiate, simplify
from geospin.expr.evaluate import CompiledExpr, compile_expr, evaluate
from geospin.expr.nodes import (
    ONE,
    ZERO,
    Binary,
    Const,
    Coord,
    Expr,
    Unary,
    depends_on,
    node_count,
    unparse,
)
from geospin.expr.parser import CONSTANTS, FUNCTIONS, parse_expr, validate_coordinates

__all__ = [
    "Binary",
    "CONSTANTS",
    "CompiledExpr",
    "Const",
    "Coord",
    "Expr",
    "FUNCTIONS",
    "ONE",
    "Unary",
    "ZERO",
    "compile_expr",
    "depends_on",
    "differentiate",
    "evaluate",
    "node_count",
    "parse_expr",
    "simplify",
    "unparse",
    "validate_coordinates",
]
