"""Tests for the metric expression language."""

import math

import pytest

from geospin.core.errors import (
    ArityError,
    DimensionMismatchError,
    EvaluationDomainError,
    ExprSyntaxError,
    InvalidParameterError,
    UnknownIdentifierError,
)
from geospin.expr import (
    Binary,
    Const,
    Coord,
    compile_expr,
    differentiate,
    evaluate,
    parse_expr,
    simplify,
    unparse,
)
from geospin.geometry.oracles import fd_partial

XY = ["x", "y"]


class TestParse:
    """Tests for parse_expr."""

    def test_half_plane_component(self):
        """1/(y^2) parses to div(1, pow(y, 2))."""
        e = parse_expr("1/(y^2)", XY)
        assert e == Binary("div", Const(1.0), Binary("pow", Coord(1, "y"), Const(2.0)))

    def test_sphere_component(self):
        """sin(theta)^2 evaluates to 1 on the equator."""
        e = parse_expr("sin(theta)^2", ["theta", "phi"])
        assert evaluate(e, [math.pi / 2, 0.0]) == pytest.approx(1.0, abs=1e-15)

    def test_precedence(self):
        """* binds tighter than +, ^ tighter than unary minus."""
        assert evaluate(parse_expr("1 + 2*3", XY), [0, 0]) == 7.0
        assert evaluate(parse_expr("-x^2", XY), [3.0, 0]) == -9.0

    def test_power_is_right_associative(self):
        """2^3^2 = 2^9."""
        assert evaluate(parse_expr("2^3^2", XY), [0, 0]) == 512.0

    def test_double_star_is_power(self):
        assert evaluate(parse_expr("x**3", XY), [2.0, 0]) == 8.0

    def test_constants_and_scientific_notation(self):
        assert evaluate(parse_expr("pi", XY), [0, 0]) == math.pi
        assert evaluate(parse_expr("e", XY), [0, 0]) == math.e
        assert evaluate(parse_expr("1.5e-3*x", XY), [2.0, 0]) == pytest.approx(3e-3)

    def test_unknown_identifier(self):
        """Names that are not coordinates, constants or functions are rejected."""
        with pytest.raises(UnknownIdentifierError) as exc:
            parse_expr("z + 1", XY)
        assert exc.value.name == "z"
        assert exc.value.position == 0

    def test_syntax_error_reports_offset(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expr("x + * y", XY)
        assert exc.value.position == 4

    def test_unbalanced_parenthesis(self):
        with pytest.raises(ExprSyntaxError):
            parse_expr("sin(x", XY)

    def test_empty_expression(self):
        with pytest.raises(ExprSyntaxError):
            parse_expr("   ", XY)

    def test_arity(self):
        """Functions take exactly one argument."""
        with pytest.raises(ArityError) as exc:
            parse_expr("sin(x, y)", XY)
        assert exc.value.got == 2

    def test_non_constant_exponent_rejected(self):
        with pytest.raises(ExprSyntaxError):
            parse_expr("x^y", XY)

    def test_constant_exponent_expression_folds(self):
        e = parse_expr("y^(-3)", XY)
        assert e.right == Const(-3.0)

    def test_coordinate_shadowing_function_rejected(self):
        with pytest.raises(InvalidParameterError):
            parse_expr("sin + 1", ["sin"])

    def test_duplicate_coordinates_rejected(self):
        with pytest.raises(InvalidParameterError):
            parse_expr("x", ["x", "x"])


class TestUnparse:
    """Tests for unparse."""

    @pytest.mark.parametrize(
        "text",
        [
            "1/(y^2)",
            "x - (y - 1)",
            "x/(y/2)",
            "-(x + y)^2",
            "sqrt(1 + x^2)*exp(-y)",
            "y^(-3) + ln(2 + x)",
        ],
    )
    def test_reparse_evaluates_identically(self, text):
        """parse(unparse(e)) evaluates bit-identically to e."""
        e = parse_expr(text, XY)
        again = parse_expr(unparse(e), XY)
        point = [0.37, 1.9]
        assert evaluate(again, point) == evaluate(e, point)

    def test_minimal_parentheses(self):
        assert unparse(parse_expr("(x*y) + (2*x)", XY)) == "x*y + 2*x"
        assert unparse(parse_expr("x - (y - 1)", XY)) == "x - (y - 1)"


class TestSimplify:
    """Tests for simplify."""

    def test_folds_constants(self):
        assert simplify(parse_expr("2*3 + 1", XY)) == Const(7.0)

    def test_identities(self):
        x = Coord(0, "x")
        assert simplify(x * 1.0) == x
        assert simplify(x + 0.0) == x
        assert simplify(x * 0.0) == Const(0.0)
        assert simplify(x ** 1.0) == x
        assert simplify(-(-x)) == x

    def test_leaves_unfoldable_constants(self):
        """ln(0) is kept so evaluation can report where it is."""
        e = simplify(parse_expr("ln(0) + x", XY))
        with pytest.raises(EvaluationDomainError):
            evaluate(e, [1.0, 1.0])

    def test_preserves_value(self):
        e = parse_expr("(x + 0)*(1*y) - 0*sin(x) + x^1", XY)
        point = [0.3, -1.7]
        assert evaluate(simplify(e), point) == pytest.approx(evaluate(e, point), rel=1e-15)


class TestDifferentiate:
    """Tests for differentiate."""

    def test_half_plane_partial(self):
        """∂_y (1/y²) = −2/y³."""
        d = differentiate(parse_expr("1/(y^2)", XY), 1)
        assert evaluate(d, [0.0, 2.0]) == pytest.approx(-0.25)

    def test_sphere_partial(self):
        """∂_θ sin²θ = 2 sinθ cosθ."""
        coords = ["theta", "phi"]
        d = differentiate(parse_expr("sin(theta)^2", coords), 0)
        theta = 0.7
        assert evaluate(d, [theta, 0.0]) == pytest.approx(2 * math.sin(theta) * math.cos(theta), rel=1e-14)

    def test_independent_subtree_is_zero(self):
        assert differentiate(parse_expr("sin(x)*exp(x)", XY), 1) == Const(0.0)

    def test_constant(self):
        assert differentiate(Const(3.0), 0) == Const(0.0)

    @pytest.mark.parametrize(
        "text",
        [
            "sin(x)*y^2 + exp(x/3)",
            "sqrt(1 + x^2)/(2 + cos(y))",
            "ln(2 + x^2*y^2) - sinh(x)*cosh(y)",
            "4/(1 - x^2 - y^2)^2",
        ],
    )
    def test_matches_central_difference(self, text, rng):
        e = parse_expr(text, XY)
        for _ in range(20):
            p = list(rng.uniform(-0.6, 0.6, size=2))
            for k in range(2):
                exact = evaluate(differentiate(e, k), p)
                assert abs(exact - fd_partial(e, p, k)) <= 1e-6 * (1 + abs(exact))


class TestEvaluate:
    """Tests for evaluate and compile_expr."""

    def test_ln_domain(self):
        with pytest.raises(EvaluationDomainError) as exc:
            evaluate(parse_expr("1 + ln(x)", XY), [0.0, 1.0])
        assert exc.value.node_text == "ln(x)"
        assert exc.value.path == (1,)

    def test_sqrt_domain(self):
        with pytest.raises(EvaluationDomainError):
            evaluate(parse_expr("sqrt(x)", XY), [-1.0, 0.0])

    def test_division_by_zero(self):
        with pytest.raises(EvaluationDomainError):
            evaluate(parse_expr("1/y", XY), [1.0, 0.0])

    def test_short_point(self):
        with pytest.raises(DimensionMismatchError):
            evaluate(parse_expr("x + y", XY), [1.0])

    def test_compiled_matches_evaluate(self, rng):
        e = parse_expr("sin(x)*y^2 + exp(x/3) - 1/(1 + y^2)", XY)
        fn = compile_expr(e)
        for _ in range(50):
            p = list(rng.uniform(-2, 2, size=2))
            assert fn(p) == evaluate(e, p)

    def test_compiled_reports_domain_error(self):
        fn = compile_expr(parse_expr("ln(y)", XY))
        with pytest.raises(EvaluationDomainError):
            fn([0.0, -1.0])
