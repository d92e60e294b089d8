"""
Copyright 2025 The GRG Tensor Engine Authors.
This file is part of GRG.

GRG is free software: you can redistribute it and/or modify it under the terms of the
GNU Affero General Public License as published by the Free Software Foundation, either
version 3 of the License, or (at your option) any later version.

GRG is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without
even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License along with GRG.
If not, see <https://www.gnu.org/licenses/>.
"""

import numpy as np
import pytest
import symexpr_models
import sympy

import common.symexpr as sx
import common.utils as utils

x, y = sympy.symbols("x y", positive=True)


def test_parse_basics() -> None:
    assert sx.parse("I^2") == -1
    assert sx.parse("2*M/r^3") == 2 * sympy.Symbol("M") / sympy.Symbol("r") ** 3
    assert sx.parse("-x^2") == -(sympy.Symbol("x") ** 2)
    assert sx.parse("2^3^2") == 2**9
    assert sx.parse("Sin[Pi/2]") == 1
    assert sx.parse("sin(x)") == sympy.sin(sympy.Symbol("x"))


def test_parse_sum_keeps_terms() -> None:
    e = sx.parse("Sin[x]^2 + Cos[x]^2")
    assert isinstance(e, sympy.Add)
    assert len(e.args) == 2


def test_parse_opaque_and_partial() -> None:
    r, u, v = sympy.symbols("r u v")
    assert sx.parse("f[r,u,v]") == sympy.Function("f")(r, u, v)
    assert sx.to_text(sx.parse("f^(1,0,1)[r,u,v]")) == "f^(1,0,1)[r,u,v]"
    assert sx.parse("f^(0,0,0)[r,u,v]") == sympy.Function("f")(r, u, v)


def test_parse_uses_assumption_symbols() -> None:
    assumptions = sx.AssumptionSet.from_strings(["0 < r"])
    assert sx.parse("r", assumptions).is_positive
    assert sx.parse("Sqrt[r^2]", assumptions) == sx.parse("r", assumptions)


@pytest.mark.parametrize(
    ("text", "position"),
    [("1 + $", 4), ("(x + 1", 6), ("x +", 3), ("", 0), ("f^(1,0)[x]", 0)],
)
def test_parse_syntax_errors(text: str, position: int) -> None:
    with pytest.raises(utils.ExprSyntaxError) as excinfo:
        sx.parse(text)
    assert excinfo.value.position == position


def test_parse_unknown_function() -> None:
    with pytest.raises(utils.UnknownFunctionError) as excinfo:
        sx.parse("ArcTan[y/x]")
    assert excinfo.value.name == "ArcTan"


def test_known_function_arity() -> None:
    with pytest.raises(utils.ExprSyntaxError):
        sx.parse("Sin[x, y]")


@pytest.mark.parametrize("text", symexpr_models.ROUND_TRIP_TEXTS)
def test_print_round_trip(text: str) -> None:
    e = sx.parse(text)
    assert sx.parse(sx.to_text(e)) == e


def test_print_forms() -> None:
    M, r = sympy.symbols("M r", positive=True)
    assert sx.to_text(-2 * M / r**3) == "-2*M/r^3"
    assert sx.to_text(6 * M**2 / r**6) == "6*M^2/r^6"
    assert sx.to_text(sympy.Integer(0)) == "0"
    assert sx.to_text(sympy.sqrt(r)) == "Sqrt[r]"
    assert sx.to_text(sympy.sin(x) ** 2) == "Sin[x]^2"


def test_diff() -> None:
    r, v = sympy.symbols("r v")
    assert sx.equivalent(
        sx.diff(sympy.cosh(v / r), r), -v / r**2 * sympy.sinh(v / r)
    )
    assert sx.diff(x**3, "x") == 3 * x**2
    assert sx.diff(sympy.Symbol("M"), r) == 0


def test_diff_of_opaque_function() -> None:
    r, u, v = sympy.symbols("r u v")
    f = sx.parse("f[r,u,v]")
    assert sx.to_text(sx.diff(sx.diff(f, r), v)) == "f^(1,0,1)[r,u,v]"
    assert sx.to_text(sx.diff(sx.diff(f, v), r)) == "f^(1,0,1)[r,u,v]"


def test_substitute() -> None:
    M, r = sympy.symbols("M r")
    assert sx.substitute(M / r**3, {"r": 2}) == M / 8
    assert sx.substitute(M + r, {M: r, r: M}) == M + r
    assert sx.substitute(M + r, {}) == M + r


@pytest.mark.parametrize(("text", "expected"), symexpr_models.SIMPLIFY_CASES)
def test_simplify(text: str, expected: str) -> None:
    assert sx.simplify(sx.parse(text)) == sx.parse(expected)


@pytest.mark.parametrize(
    ("assumed", "text", "expected"), symexpr_models.ASSUMED_SIMPLIFY_CASES
)
def test_simplify_with_assumptions(
    assumed: tuple[str, ...], text: str, expected: str
) -> None:
    assumptions = sx.AssumptionSet.from_strings(assumed)
    simplified = sx.simplify(sx.parse(text, assumptions), assumptions)
    assert simplified == sx.simplify(sx.parse(expected, assumptions), assumptions)


@pytest.mark.parametrize("text", symexpr_models.ROUND_TRIP_TEXTS)
def test_simplify_is_idempotent(text: str) -> None:
    once = sx.simplify(sx.parse(text))
    assert sx.simplify(once) == once


def _random_tree(rng: np.random.Generator, depth: int) -> sympy.Expr:
    if depth == 0 or rng.random() < 0.35:
        return [x, y, sympy.Integer(int(rng.integers(1, 5)))][int(rng.integers(0, 3))]

    match int(rng.integers(0, 7)):
        case 0:
            return _random_tree(rng, depth - 1) + _random_tree(rng, depth - 1)
        case 1:
            return _random_tree(rng, depth - 1) * _random_tree(rng, depth - 1)
        case 2:
            return _random_tree(rng, depth - 1) / (1 + x * _random_tree(rng, depth - 1) ** 2)
        case 3:
            return sympy.sin(_random_tree(rng, depth - 1))
        case 4:
            return sympy.cos(2 * _random_tree(rng, depth - 1))
        case 5:
            return sympy.cosh(_random_tree(rng, depth - 1) / 4)
        case _:
            return _random_tree(rng, depth - 1) ** 2


def _random_points(rng: np.random.Generator, count: int) -> list[dict[str, float]]:
    # both symbols are declared positive; x > 0 also keeps 1 + x*t^2 away from zero
    return [
        {"x": float(rng.uniform(0.2, 1.8)), "y": float(rng.uniform(0.2, 1.8))}
        for _ in range(count)
    ]


def _agree(e1: sympy.Expr, e2: sympy.Expr, points: list[dict[str, float]]) -> bool:
    # points where either side overflows are skipped
    for point in points:
        try:
            v1, v2 = sx.eval_numeric(e1, point), sx.eval_numeric(e2, point)
        except utils.SingularPointError:
            continue
        if abs(v1 - v2) > 1e-8 * (1 + abs(v1) + abs(v2)):
            return False
    return True


def test_simplify_keeps_values() -> None:
    rng = np.random.default_rng(7)
    for _ in range(100):
        e = _random_tree(rng, int(rng.integers(1, 7)))
        assert _agree(e, sx.simplify(e), _random_points(rng, 3)), e


def test_canonical_form_keeps_values() -> None:
    rng = np.random.default_rng(8)
    for _ in range(30):
        e = _random_tree(rng, int(rng.integers(1, 5)))
        assert _agree(e, sx.simplify(e, tidy=False), _random_points(rng, 3)), e


def test_diff_is_linear() -> None:
    rng = np.random.default_rng(9)
    for _ in range(30):
        e1, e2 = _random_tree(rng, 4), _random_tree(rng, 4)
        a, b = (sympy.Integer(int(rng.integers(-4, 5))) for _ in range(2))
        combined = sx.diff(a * e1 + b * e2, "x")
        separate = a * sx.diff(e1, "x") + b * sx.diff(e2, "x")
        assert _agree(combined, separate, _random_points(rng, 3)), (e1, e2)


def test_mixed_partials_commute() -> None:
    rng = np.random.default_rng(10)
    for _ in range(30):
        e = _random_tree(rng, 4)
        xy = sx.diff(sx.diff(e, "x"), "y")
        yx = sx.diff(sx.diff(e, "y"), "x")
        assert _agree(xy, yx, _random_points(rng, 3)), e


def test_eval_numeric() -> None:
    M, r = sympy.symbols("M r")
    assert sx.eval_numeric(48 * M**2 / r**6, {"M": 1, "r": 2}) == pytest.approx(0.75)
    assert sx.eval_numeric(sx.parse("Sin[x]^2 + Cos[x]^2"), {"x": 0.7}) == pytest.approx(1)
    assert sx.eval_numeric(sx.parse("I*I"), {}) == pytest.approx(-1)


def test_eval_numeric_errors() -> None:
    with pytest.raises(utils.UnboundSymbolError):
        sx.eval_numeric(sx.parse("x + y"), {"x": 1})
    with pytest.raises(utils.UnboundSymbolError):
        sx.eval_numeric(sx.parse("f[x]"), {"x": 1})
    with pytest.raises(utils.SingularPointError):
        sx.eval_numeric(sx.parse("1/x"), {"x": 0})
    with pytest.raises(utils.DomainError):
        sx.eval_numeric(sx.parse("Sqrt[x]"), {"x": -1}, real=True)


def test_eval_numeric_binds_functions() -> None:
    e = sx.parse("f[x] + f^(1)[x]")
    value = sx.eval_numeric(e, {"x": 0.5}, functions={"f": sympy.exp})
    assert value == pytest.approx(2 * np.exp(0.5))


def test_equivalent() -> None:
    assumptions = sx.AssumptionSet.from_strings(["0 < M", "0 < r"])
    e1 = sx.parse("2*M*(2*M - r)/r^4", assumptions)
    e2 = sx.parse("4*M^2/r^4 - 2*M/r^3", assumptions)
    assert sx.equivalent(e1, e2, assumptions)
    assert not sx.equivalent(e1, -e2, assumptions)
    assert sx.equivalent(sx.parse("Sin[x]^2"), sx.parse("(1 - Cos[2*x])/2"))


def test_equivalent_with_opaque_functions() -> None:
    assert sx.equivalent(
        sx.parse("f^(1,1)[x,y]"), sx.diff(sx.diff(sx.parse("f[x,y]"), "y"), "x")
    )
    assert not sx.equivalent(sx.parse("f^(1,0)[x,y]"), sx.parse("f^(0,1)[x,y]"))


def test_equivalent_is_deterministic() -> None:
    e1, e2 = sx.parse("x^2 + 1"), sx.parse("x^2 + 1 + 10^(-12)*x")
    results = {sx.equivalent(e1, e2, seed=11) for _ in range(3)}
    assert len(results) == 1


def test_equivalent_inconclusive() -> None:
    with pytest.raises(utils.InconclusiveComparison):
        sx.equivalent(sx.parse("1/(x - x)"), sx.parse("1"))


def test_split_complex() -> None:
    real, imag = sx.split_complex(sx.parse("(x + I*y)^2"))
    assert sympy.expand(real) == sx.parse("x^2 - y^2")
    assert imag == sx.parse("2*x*y")


def test_assumption_intervals() -> None:
    assumptions = sx.AssumptionSet.from_strings(["0 < theta < Pi", "M > 0", "x < 1"])
    assert assumptions.numeric_interval("theta") == pytest.approx((0, np.pi))
    assert assumptions.numeric_interval("M") == (0.0, None)
    assert assumptions.numeric_interval("x") == (None, 1.0)
    assert assumptions.numeric_interval("q") is None

    low, high = assumptions.sampling_interval("theta")
    assert 0 < low < high < np.pi
    assert assumptions.sampling_interval("q") == sx.DEFAULT_INTERVAL
    assert assumptions.symbol("x").is_real
    assert assumptions.symbol("M").is_positive


@pytest.mark.parametrize("texts", symexpr_models.BAD_ASSUMPTIONS)
def test_bad_assumptions(texts: tuple[str, ...]) -> None:
    with pytest.raises(utils.SpecError):
        sx.AssumptionSet.from_strings(texts)
