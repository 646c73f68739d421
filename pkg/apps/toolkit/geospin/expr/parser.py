"""Recursive-descent parser for metric expressions.

Grammar (see docs/expression-grammar.md):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("-" | "+") factor | power
    power  := atom (("^" | "**") factor)?
    atom   := NUMBER | COORD | CONST | FUNC "(" expr ")" | "(" expr ")"

`^` is right-associative and its exponent must fold to a constant.
"""

import math
import re
from dataclasses import dataclass
from typing import Sequence

from geospin.core.errors import (
    ArityError,
    ExprSyntaxError,
    InvalidParameterError,
    UnknownIdentifierError,
)
from geospin.expr.calculus import simplify
from geospin.expr.nodes import UNARY_OPS, Binary, Const, Coord, Expr, Unary

FUNCTIONS = tuple(op for op in UNARY_OPS if op != "neg")
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[^\W\d]\w*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)

_ATOM_START = ("number", "identifier", "(")


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | eof
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Split text into tokens, ending with an eof token at len(text)."""
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ExprSyntaxError(f"Unexpected character '{text[pos]}'", pos, _ATOM_START)
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def validate_coordinates(coords: Sequence[str]) -> None:
    """Coordinate names must be identifiers distinct from functions and constants."""
    seen = set()
    for name in coords:
        if not re.fullmatch(r"[^\W\d]\w*", name):
            raise InvalidParameterError("coordinates", name, "not an identifier")
        if name in FUNCTIONS or name in CONSTANTS:
            raise InvalidParameterError("coordinates", name, "shadows a function or constant")
        if name in seen:
            raise InvalidParameterError("coordinates", name, "duplicate coordinate name")
        seen.add(name)


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.tokens = tokenize(text)
        self.index = 0
        self.coords = {name: i for i, name in enumerate(coords)}

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _at(self, *texts: str) -> bool:
        return self.current.kind == "op" and self.current.text in texts

    def _expect(self, text: str) -> Token:
        if not self._at(text):
            self._fail([f"'{text}'"])
        return self._advance()

    def _fail(self, expected: Sequence[str]) -> None:
        token = self.current
        if token.kind == "eof":
            raise ExprSyntaxError("Unexpected end of input", token.position, expected)
        raise ExprSyntaxError(f"Unexpected token '{token.text}'", token.position, expected)

    def parse(self) -> Expr:
        if self.current.kind == "eof":
            raise ExprSyntaxError("Empty expression", 0, _ATOM_START)
        tree = self._expr()
        if self.current.kind != "eof":
            self._fail(["operator", "end of input"])
        return tree

    def _expr(self) -> Expr:
        tree = self._term()
        while self._at("+", "-"):
            op = "add" if self._advance().text == "+" else "sub"
            tree = Binary(op, tree, self._term())
        return tree

    def _term(self) -> Expr:
        tree = self._factor()
        while self._at("*", "/"):
            op = "mul" if self._advance().text == "*" else "div"
            tree = Binary(op, tree, self._factor())
        return tree

    def _factor(self) -> Expr:
        if self._at("-"):
            self._advance()
            return Unary("neg", self._factor())
        if self._at("+"):
            self._advance()
            return self._factor()
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self._at("^", "**"):
            position = self._advance().position
            exponent = simplify(self._factor())
            if not isinstance(exponent, Const):
                raise ExprSyntaxError("Exponent must be a constant", position + 1, ["number"])
            return Binary("pow", base, exponent)
        return base

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self._advance()
            return Const(float(token.text))
        if token.kind == "name":
            self._advance()
            if token.text in self.coords:
                return Coord(self.coords[token.text], token.text)
            if token.text in CONSTANTS:
                return Const(CONSTANTS[token.text])
            if token.text in FUNCTIONS:
                return self._call(token)
            raise UnknownIdentifierError(token.text, token.position)
        if self._at("("):
            self._advance()
            tree = self._expr()
            self._expect(")")
            return tree
        self._fail(_ATOM_START)
        raise AssertionError("unreachable")

    def _call(self, name: Token) -> Expr:
        if not self._at("("):
            raise ArityError(name.text, name.position, 0)
        self._advance()
        args: list[Expr] = []
        if not self._at(")"):
            args.append(self._expr())
            while self._at(","):
                self._advance()
                args.append(self._expr())
        self._expect(")")
        if len(args) != 1:
            raise ArityError(name.text, name.position, len(args))
        return Unary(name.text, args[0])


def parse_expr(text: str, coords: Sequence[str]) -> Expr:
    """Parse expression text over the given coordinate names.

    Args:
        text: Expression such as "1/(y^2)" or "sin(theta)^2"
        coords: Chart coordinate names; position in the list is the index

    Returns:
        The expression AST

    Raises:
        ExprSyntaxError: Malformed input (carries offset and expected tokens)
        UnknownIdentifierError: Name that is not a coordinate, constant or function
        ArityError: Function called with other than one argument
    """
    validate_coordinates(coords)
    return _Parser(text, coords).parse()
