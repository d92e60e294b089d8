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

# The expression kernel. Expressions are plain sympy trees; this module owns the
# text grammar (parse / to_text), the bounded simplifier every tensor component
# passes through, and the numeric probing used to decide equivalence.
#
# simplify never calls sympy.simplify. It runs a fixed pipeline:
#   1. attach assumption symbols so sympy can fold sqrt(r^2) -> r itself
#   2. rewrite tan/cot/sec/csc and their hyperbolic cousins into sin/cos/sinh/cosh
#   3. expand integer multiple angles (sin(2x) -> 2 sin(x) cos(x))
#   4. resolve Abs[...] whose sign the assumption intervals decide
#   5. bring everything over a common denominator and cancel the polynomial gcd
#   6. reduce cos^2 -> 1 - sin^2 and cosh^2 -> 1 + sinh^2 in numerator and denominator
#   7. cancel again

import cmath
import math
import re
import typing

import attrs
import numpy as np
import sympy
from sympy.core.function import AppliedUndef
from sympy.polys.polyerrors import BasePolynomialError, PolificationFailed, PolynomialError

import common.utils as utils

Expr: typing.TypeAlias = sympy.Expr

KNOWN_FUNCTIONS: dict[str, typing.Any] = {
    "Sin": sympy.sin,
    "Cos": sympy.cos,
    "Tan": sympy.tan,
    "Cot": sympy.cot,
    "Sec": sympy.sec,
    "Csc": sympy.csc,
    "Sinh": sympy.sinh,
    "Cosh": sympy.cosh,
    "Tanh": sympy.tanh,
    "Coth": sympy.coth,
    "Sech": sympy.sech,
    "Csch": sympy.csch,
    "Exp": sympy.exp,
    "Log": sympy.log,
    "Sqrt": sympy.sqrt,
    "Abs": sympy.Abs,
}
_FUNCTIONS_BY_LOWER = {k.lower(): v for k, v in KNOWN_FUNCTIONS.items()}
_FUNCTION_NAMES = {v: k for k, v in KNOWN_FUNCTIONS.items() if k != "Sqrt"}

# differential token of a line element, Dt[r]
Dt = sympy.Function("Dt")

DEFAULT_INTERVAL = (0.1, 10.0)
RELATIVE_TOLERANCE = 1e-9


def _bound_value(bound: Expr | None) -> float | None:
    return None if bound is None else float(bound)


@attrs.define(frozen=True)
class AssumptionSet:
    """Open intervals for named symbols, e.g. ``0 < theta < Pi``."""

    intervals: dict[str, tuple[Expr | None, Expr | None]] = attrs.field(
        factory=dict
    )

    @classmethod
    def from_strings(cls, texts: typing.Iterable[str]) -> "AssumptionSet":
        intervals: dict[str, tuple[Expr | None, Expr | None]] = {}

        for text in texts:
            name, lower, upper = _parse_assumption(text)
            if name in intervals:
                raise utils.SpecError(f"Symbol {name!r} is assumed more than once.")

            low, high = _bound_value(lower), _bound_value(upper)
            if low is not None and high is not None and not low < high:
                raise utils.SpecError(f"Empty interval for {name!r}: {text!r}.")
            intervals[name] = (lower, upper)

        return cls(intervals)

    def symbol(self, name: str) -> sympy.Symbol:
        if name not in self.intervals:
            return sympy.Symbol(name)

        lower, _ = self.intervals[name]
        if lower is not None and float(lower) >= 0:
            return sympy.Symbol(name, positive=True)
        return sympy.Symbol(name, real=True)

    def attach(self, e: Expr) -> Expr:
        swaps = {
            s: self.symbol(s.name)
            for s in e.free_symbols
            if isinstance(s, sympy.Symbol) and s.name in self.intervals
        }
        return e.xreplace(swaps) if swaps else e

    def numeric_interval(self, name: str) -> tuple[float, float] | None:
        if name not in self.intervals:
            return None
        lower, upper = self.intervals[name]
        return _bound_value(lower), _bound_value(upper)  # type: ignore

    def sampling_interval(self, name: str) -> tuple[float, float]:
        if name not in self.intervals:
            return DEFAULT_INTERVAL

        low, high = self.numeric_interval(name)  # type: ignore
        if low is not None and high is not None:
            margin = (high - low) * 0.01
            return low + margin, high - margin
        if low is not None:
            return low + 0.1, low + 10.0
        return high - 10.0, high - 0.1  # type: ignore


EMPTY_ASSUMPTIONS = AssumptionSet()

_RELATION = re.compile(r"(<|>)")
_IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9]*")


def _parse_assumption(text: str) -> tuple[str, Expr | None, Expr | None]:
    parts = [p.strip() for p in _RELATION.split(text)]
    if len(parts) not in {3, 5}:
        raise utils.SpecError(f"Could not read assumption {text!r}.")

    operands = parts[::2]
    relations = parts[1::2]
    if len(set(relations)) != 1:
        raise utils.SpecError(f"Mixed relations in assumption {text!r}.")
    if relations[0] == ">":
        operands.reverse()

    # operands now read low < ... < high
    names = [
        i
        for i, o in enumerate(operands)
        if _IDENTIFIER.fullmatch(o) and o not in {"Pi", "I"}
    ]
    if len(operands) == 3:
        if names != [1]:
            raise utils.SpecError(f"Assumption {text!r} must bound a single symbol.")
        return operands[1], _constant(operands[0], text), _constant(operands[2], text)

    if names == [1]:
        return operands[1], _constant(operands[0], text), None
    if names == [0]:
        return operands[0], None, _constant(operands[1], text)
    raise utils.SpecError(f"Assumption {text!r} must bound a single symbol.")


def _constant(text: str, whole: str) -> Expr:
    try:
        value = parse(text)
    except utils.GRGError as e:
        raise utils.SpecError(f"Bad bound in assumption {whole!r}: {e}") from None
    if value.free_symbols:
        raise utils.SpecError(f"Bound in assumption {whole!r} is not a constant.")
    return value


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()\[\],]))"
)


class _Token(typing.NamedTuple):
    kind: str
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise utils.ExprSyntaxError(f"Unexpected character {text[bad]!r}", text, bad)

        kind = match.lastgroup
        assert kind is not None  # noqa: S101
        tokens.append(_Token(kind, match.group(kind), match.start(kind)))
        pos = match.end()

    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(
        self, text: str, symbol: typing.Callable[[str], sympy.Symbol]
    ) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0
        self.symbol = symbol

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def peek(self, offset: int) -> _Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def error(self, message: str, token: _Token | None = None) -> utils.ExprSyntaxError:
        token = token or self.current
        return utils.ExprSyntaxError(message, self.text, token.position)

    def advance(self) -> _Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, text: str) -> _Token:
        if self.current.text != text or self.current.kind != "op":
            raise self.error(f"Expected {text!r}")
        return self.advance()

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise self.error("Empty expression")
        value = self.expression()
        if self.current.kind != "end":
            raise self.error(f"Unexpected {self.current.text!r}")
        return value

    def expression(self) -> Expr:
        value = self.term()
        while self.current.kind == "op" and self.current.text in {"+", "-"}:
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Expr:
        value = self.unary()
        while self.current.kind == "op" and self.current.text in {"*", "/"}:
            op = self.advance().text
            rhs = self.unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text in {"+", "-"}:
            op = self.advance().text
            value = self.unary()
            return -value if op == "-" else value
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            return base ** self.unary()
        return base

    def primary(self) -> Expr:
        token = self.current

        if token.kind == "number":
            self.advance()
            return sympy.Integer(int(token.text))

        if token.kind == "name":
            if self._at_partial_notation():
                return self.partial()

            self.advance()
            if self.current.kind == "op" and self.current.text in {"[", "("}:
                return self.call(token)
            if token.text == "I":
                return sympy.I
            if token.text == "Pi":
                return sympy.pi
            return self.symbol(token.text)

        if token.kind == "op" and token.text == "(":
            self.advance()
            value = self.expression()
            self.expect(")")
            return value

        if token.kind == "end":
            raise self.error("Unexpected end of expression")
        raise self.error(f"Unexpected {token.text!r}")

    def _at_partial_notation(self) -> bool:
        # f^(2,0,1)[r,u,v]: '^' '(' int (',' int)* ')' '['
        if self.peek(1).text != "^" or self.peek(2).text != "(":
            return False
        offset = 3
        while True:
            if self.peek(offset).kind != "number":
                return False
            offset += 1
            if self.peek(offset).text == ",":
                offset += 1
                continue
            return self.peek(offset).text == ")" and self.peek(offset + 1).text == "["

    def partial(self) -> Expr:
        name_token = self.advance()
        self.expect("^")
        self.expect("(")
        counts = [int(self.advance().text)]
        while self.current.text == ",":
            self.advance()
            counts.append(int(self.advance().text))
        self.expect(")")

        args = self.arguments("]")
        if len(args) != len(counts) or not all(isinstance(a, sympy.Symbol) for a in args):
            raise self.error("Partial derivative orders do not match the arguments", name_token)
        return opaque_function(name_token.text, args, counts)

    def arguments(self, closer: str) -> list[Expr]:
        self.advance()
        args = [self.expression()]
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            args.append(self.expression())
        self.expect(closer)
        return args

    def call(self, name_token: _Token) -> Expr:
        closer = "]" if self.current.text == "[" else ")"
        args = self.arguments(closer)
        name = name_token.text

        if fn := _FUNCTIONS_BY_LOWER.get(name.lower()):
            if len(args) != 1:
                raise self.error(f"{name} takes exactly one argument", name_token)
            return fn(args[0])

        if name == "Dt":
            if len(args) != 1 or not isinstance(args[0], sympy.Symbol):
                raise self.error("Dt takes a single coordinate", name_token)
            return Dt(args[0])

        if all(isinstance(a, sympy.Symbol) for a in args):
            return opaque_function(name, args)
        raise utils.UnknownFunctionError(name)


def parse(text: str, assumptions: AssumptionSet | None = None) -> Expr:
    """Parses the text grammar into a sympy expression.

    Symbols named in ``assumptions`` carry their sign information, so every
    expression built in one session shares the same symbol objects.
    """
    symbol = (assumptions or EMPTY_ASSUMPTIONS).symbol
    return _Parser(text, symbol).parse()


def opaque_function(
    name: str, args: typing.Sequence[Expr], counts: typing.Sequence[int] | None = None
) -> Expr:
    applied = sympy.Function(name)(*args)
    if not counts or not any(counts):
        return applied
    return sympy.Derivative(applied, *[(a, c) for a, c in zip(args, counts, strict=True) if c])


_ADD = 10
_MUL = 20
_POW = 30
_ATOM = 40


def _wrap(printed: tuple[str, int], needed: int) -> str:
    text, prec = printed
    return f"({text})" if prec < needed else text


def _print(e: Expr) -> tuple[str, int]:  # noqa: C901
    if isinstance(e, sympy.Integer):
        return str(e.p), _MUL if e.p < 0 else _ATOM
    if isinstance(e, sympy.Rational):
        return f"{e.p}/{e.q}", _MUL
    if e is sympy.I:
        return "I", _ATOM
    if e is sympy.pi:
        return "Pi", _ATOM
    if e is sympy.E:
        return "Exp[1]", _ATOM
    if isinstance(e, sympy.Symbol):
        return e.name, _ATOM
    if isinstance(e, sympy.Add):
        return _print_add(e)
    if isinstance(e, sympy.Mul):
        return _print_mul(e)
    if isinstance(e, sympy.Pow):
        return _print_pow(e)
    if isinstance(e, sympy.Derivative):
        return _print_derivative(e)
    if isinstance(e, AppliedUndef):
        args = ",".join(_print(a)[0] for a in e.args)
        return f"{e.func.__name__}[{args}]", _ATOM
    if name := _FUNCTION_NAMES.get(type(e)):
        return f"{name}[{_print(e.args[0])[0]}]", _ATOM
    return str(e), _ATOM


def _print_add(e: sympy.Add) -> tuple[str, int]:
    terms = e.as_ordered_terms()
    pieces = [_print(terms[0])[0]]
    for term in terms[1:]:
        if term.could_extract_minus_sign():
            pieces.append(f" - {_wrap(_print(-term), _MUL)}")
        else:
            pieces.append(f" + {_wrap(_print(term), _MUL)}")
    return "".join(pieces), _ADD


def _print_mul(e: sympy.Mul) -> tuple[str, int]:
    if e.could_extract_minus_sign():
        return f"-{_wrap(_print(-e), _MUL)}", _MUL

    num, den = sympy.fraction(e)
    num_factors = num.as_ordered_factors() if isinstance(num, sympy.Mul) else [num]
    num_text = "*".join(_wrap(_print(f), _MUL) for f in num_factors)
    if den == 1:
        return num_text, _MUL

    return f"{num_text}/{_wrap(_print(den), _POW)}", _MUL


def _print_pow(e: sympy.Pow) -> tuple[str, int]:
    base, exponent = e.args
    if exponent == sympy.Rational(1, 2):
        return f"Sqrt[{_print(base)[0]}]", _ATOM
    if exponent.is_Rational and exponent.is_negative:
        return f"1/{_wrap(_print(base ** -exponent), _POW)}", _MUL

    base_text = _wrap(_print(base), _ATOM)
    exp_printed = _print(exponent)
    if isinstance(exponent, (sympy.Integer, sympy.Symbol)) and exp_printed[1] == _ATOM:
        return f"{base_text}^{exp_printed[0]}", _POW
    return f"{base_text}^({exp_printed[0]})", _POW


def _print_derivative(e: sympy.Derivative) -> tuple[str, int]:
    inner = e.expr
    if not isinstance(inner, AppliedUndef):
        return str(e), _ATOM

    counts = dict.fromkeys(inner.args, 0)
    for var, count in e.variable_count:
        counts[var] = counts.get(var, 0) + int(count)
    orders = ",".join(str(counts[a]) for a in inner.args)
    args = ",".join(_print(a)[0] for a in inner.args)
    return f"{inner.func.__name__}^({orders})[{args}]", _ATOM


def to_text(e: Expr) -> str:
    return _print(sympy.sympify(e))[0]


def _resolve_symbol(e: Expr, x: sympy.Symbol | str) -> sympy.Symbol:
    if isinstance(x, sympy.Symbol):
        return x
    for s in e.free_symbols:
        if isinstance(s, sympy.Symbol) and s.name == x:
            return s
    return sympy.Symbol(x)


def diff(e: Expr, x: sympy.Symbol | str) -> Expr:
    return sympy.diff(e, _resolve_symbol(e, x))


def substitute(e: Expr, bindings: typing.Mapping[sympy.Symbol | str, Expr]) -> Expr:
    if not bindings:
        return e
    by_name = {(k if isinstance(k, str) else k.name): v for k, v in bindings.items()}
    if len(by_name) != len(bindings):
        raise ValueError("A symbol is bound more than once.")

    mapping = {
        s: by_name[s.name]
        for s in e.free_symbols
        if isinstance(s, sympy.Symbol) and s.name in by_name
    }
    return e.subs(mapping, simultaneous=True)


def free_names(e: Expr) -> set[str]:
    return {s.name for s in e.free_symbols if isinstance(s, sympy.Symbol)}


def opaque_names(e: Expr) -> set[str]:
    return {
        f.func.__name__ for f in e.atoms(AppliedUndef) if f.func.__name__ != "Dt"
    }


_RECIPROCALS = (
    (sympy.tan, lambda x: sympy.sin(x) / sympy.cos(x)),
    (sympy.cot, lambda x: sympy.cos(x) / sympy.sin(x)),
    (sympy.sec, lambda x: 1 / sympy.cos(x)),
    (sympy.csc, lambda x: 1 / sympy.sin(x)),
    (sympy.tanh, lambda x: sympy.sinh(x) / sympy.cosh(x)),
    (sympy.coth, lambda x: sympy.cosh(x) / sympy.sinh(x)),
    (sympy.sech, lambda x: 1 / sympy.cosh(x)),
    (sympy.csch, lambda x: 1 / sympy.sinh(x)),
)

MAX_ANGLE_MULTIPLE = 8


def _rewrite_reciprocals(e: Expr) -> Expr:
    for fn, rewrite in _RECIPROCALS:
        if e.has(fn):
            e = e.replace(fn, rewrite)
    return e


def _multiple_angle(fn: typing.Any, arg: Expr) -> Expr:
    coeff, rest = arg.as_coeff_Mul()
    if not (coeff.is_Integer and 2 <= coeff <= MAX_ANGLE_MULTIPLE):
        return fn(arg)

    n = int(coeff)
    if fn in {sympy.sin, sympy.cos}:
        sin, cos = sympy.sin, sympy.cos
        hyperbolic = False
    else:
        sin, cos = sympy.sinh, sympy.cosh
        hyperbolic = True

    # angle addition, unrolled n - 1 times
    s, c = sin(rest), cos(rest)
    sn, cn = s, c
    for _ in range(n - 1):
        sn, cn = sn * c + cn * s, (cn * c + sn * s) if hyperbolic else (cn * c - sn * s)
    return sympy.expand(sn if fn in {sympy.sin, sympy.sinh} else cn)


def _expand_multiple_angles(e: Expr) -> Expr:
    for fn in (sympy.sin, sympy.cos, sympy.sinh, sympy.cosh):
        if e.has(fn):
            e = e.replace(fn, lambda x, fn=fn: _multiple_angle(fn, x))
    return e


def _sign(e: Expr, a: AssumptionSet) -> int | None:  # noqa: C901
    if e.is_positive:
        return 1
    if e.is_negative:
        return -1

    if isinstance(e, sympy.Mul):
        total = 1
        for factor in e.args:
            s = _sign(factor, a)
            if s is None:
                return None
            total *= s
        return total

    if isinstance(e, sympy.Pow):
        base, exponent = e.args
        if exponent.is_Integer and exponent % 2 == 0 and _sign(base, a) is not None:
            return 1
        s = _sign(base, a)
        if s is None:
            return None
        if exponent.is_Integer:
            return s ** int(exponent)
        return 1 if s == 1 else None

    if isinstance(e, sympy.Add):
        signs = {_sign(term, a) for term in e.args}
        return signs.pop() if len(signs) == 1 else None

    if isinstance(e, (sympy.cosh, sympy.exp)):
        return 1 if e.args[0].is_real else None
    if isinstance(e, sympy.sinh):
        return _sign(e.args[0], a)

    if isinstance(e, (sympy.sin, sympy.cos)) and isinstance(e.args[0], sympy.Symbol):
        interval = a.numeric_interval(e.args[0].name)
        if interval is None or None in interval:
            return None
        low, high = interval
        if isinstance(e, sympy.sin):
            if low >= 0 and high <= math.pi:
                return 1
            if low >= -math.pi and high <= 0:
                return -1
        elif low >= -math.pi / 2 and high <= math.pi / 2:
            return 1

    return None


def _resolve_abs(e: Expr, a: AssumptionSet) -> Expr:
    if not e.has(sympy.Abs):
        return e

    def resolve(x: Expr) -> Expr:
        s = _sign(x, a)
        if s == 1:
            return x
        if s == -1:
            return -x
        return sympy.Abs(x)

    return e.replace(sympy.Abs, resolve)


def _reduce_square(e: Expr, gen: Expr, square: Expr) -> Expr:
    try:
        poly = sympy.Poly(e, gen)
    except (PolynomialError, PolificationFailed):
        return e
    if poly.degree() < 2:
        return e

    total = sympy.Integer(0)
    for (k,), coeff in poly.terms():
        total += coeff * gen ** (k % 2) * square ** (k // 2)
    return sympy.expand(total)


def _pythagorean(e: Expr) -> Expr:
    e = sympy.expand(e)
    for c in sorted(e.atoms(sympy.cos), key=sympy.default_sort_key):
        e = _reduce_square(e, c, 1 - sympy.sin(c.args[0]) ** 2)
    for c in sorted(e.atoms(sympy.cosh), key=sympy.default_sort_key):
        e = _reduce_square(e, c, 1 + sympy.sinh(c.args[0]) ** 2)
    return e


def _reverse_pythagorean(e: Expr) -> Expr:
    e = sympy.expand(e)
    for s in sorted(e.atoms(sympy.sin), key=sympy.default_sort_key):
        e = _reduce_square(e, s, 1 - sympy.cos(s.args[0]) ** 2)
    for s in sorted(e.atoms(sympy.sinh), key=sympy.default_sort_key):
        e = _reduce_square(e, s, sympy.cosh(s.args[0]) ** 2 - 1)
    return e


def _factored(e: Expr) -> Expr:
    try:
        return sympy.factor(e)
    except BasePolynomialError:
        return e


def _hyperbolic_factored(e: Expr) -> Expr | None:
    """Factors ``e`` with every Cosh[x] and Sinh[x] written through t = Exp[x].

    Products like (r*Cosh[x] - v*Sinh[x])^2 stop being visible once the square
    identity has been applied, but they are ordinary polynomial factors in t.
    """
    args = sorted(
        {f.args[0] for f in e.atoms(sympy.cosh, sympy.sinh)}, key=sympy.default_sort_key
    )
    if not args:
        return None

    ts = [sympy.Dummy(f"t{j}", positive=True) for j in range(len(args))]
    mapping: dict[Expr, Expr] = {}
    for x, t in zip(args, ts, strict=True):
        mapping[sympy.cosh(x)] = (t + 1 / t) / 2
        mapping[sympy.sinh(x)] = (t - 1 / t) / 2

    try:
        num, den = sympy.fraction(sympy.cancel(e.xreplace(mapping)))
        num_coeff, num_factors = sympy.factor_list(num)
        den_coeff, den_factors = sympy.factor_list(den)

        result = num_coeff / den_coeff
        shift = dict.fromkeys(ts, 0)
        for base, power in [*num_factors, *((b, -p) for b, p in den_factors)]:
            if base in shift:
                shift[base] += power
                continue

            # base(t) = back * t^k with back a polynomial in Cosh[x] and Sinh[x]
            back = base
            for x, t in zip(args, ts, strict=True):
                k = int(sympy.degree(base, t)) // 2
                shift[t] += k * power
                back = back.xreplace({t: sympy.cosh(x) + sympy.sinh(x)})
                back *= (sympy.cosh(x) - sympy.sinh(x)) ** k
            result *= _factored(_pythagorean(back)) ** power
    except BasePolynomialError:
        return None

    for x, t in zip(args, ts, strict=True):
        if shift[t]:
            result *= sympy.exp(shift[t] * x)
    return result


# past this many operations the readable forms are not searched for
TIDY_LIMIT = 2000


def _tidy(form: Expr) -> Expr:
    # the smallest of a few equal forms; ties keep the canonical one
    if form.is_Number or sympy.count_ops(form) > TIDY_LIMIT:
        return form

    num, den = sympy.fraction(form)
    flipped = _reverse_pythagorean(num) / _reverse_pythagorean(den)
    candidates = [form, flipped, _factored(form), _factored(flipped)]
    if (hyperbolic := _hyperbolic_factored(form)) is not None:
        candidates.append(hyperbolic)
    return min(candidates, key=sympy.count_ops)


def _by_function(e: Expr) -> dict[Expr, list[Expr]]:
    # terms of e keyed by their factors that involve opaque functions
    groups: dict[Expr, list[Expr]] = {}
    for term in sympy.Add.make_args(sympy.expand(e)):
        key = sympy.Mul(*[f for f in sympy.Mul.make_args(term) if f.has(AppliedUndef)])
        groups.setdefault(key, []).append(term / key)
    return groups


def _canonical(e: Expr, a: AssumptionSet) -> Expr:
    e = a.attach(e)
    e = _rewrite_reciprocals(e)
    e = _expand_multiple_angles(e)
    e = _resolve_abs(e, a)

    e = sympy.cancel(sympy.together(e))
    num, den = sympy.fraction(e)
    e = sympy.cancel(_pythagorean(num) / _pythagorean(den))
    return _resolve_abs(e, a)


def simplify(
    e: Expr, assumptions: AssumptionSet | None = None, *, tidy: bool = True
) -> Expr:
    """Bounded simplification.

    With ``tidy=False`` the result is the canonical form: an expanded fraction
    with Cos and Cosh of degree at most one, which is what cached components
    keep. The default also searches a few equal forms for the smallest one and
    keeps the terms of each opaque-function derivative apart.
    """
    a = assumptions or EMPTY_ASSUMPTIONS
    e = sympy.sympify(e)
    if e.is_Number:
        return e

    if tidy and e.has(AppliedUndef):
        groups = _by_function(a.attach(e))
        if len(groups) > 1:
            return sympy.Add(
                *[simplify(sympy.Add(*terms), a) * key for key, terms in groups.items()]
            )

    form = _canonical(e, a)
    if not tidy:
        return form

    best = _tidy(form)
    for _ in range(2):
        again = _canonical(best, a)
        if again == form:
            break
        form, best = again, _tidy(again)
    return best


def split_complex(e: Expr, assumptions: AssumptionSet | None = None) -> tuple[Expr, Expr]:
    """Splits ``e`` into real and imaginary parts, treating every symbol as real."""
    e = sympy.cancel(sympy.together(sympy.expand(e)))
    num, den = sympy.fraction(e)
    if den.has(sympy.I):
        conj = den.subs(sympy.I, -sympy.I)
        num, den = num * conj, den * conj

    num, den = sympy.expand(num), sympy.expand(den)
    real = num.coeff(sympy.I, 0)
    imag = num.coeff(sympy.I, 1)
    return simplify(real / den, assumptions), simplify(imag / den, assumptions)


TestFunction = typing.Callable[..., Expr]

TEST_FUNCTIONS: tuple[TestFunction, ...] = (
    lambda *xs: sympy.exp(sum(x / (j + 2) for j, x in enumerate(xs))),
    lambda *xs: 2 + sum(sympy.sin((j + 1) * x) for j, x in enumerate(xs)),
    lambda *xs: sympy.Mul(*[1 + x**2 / (j + 1) for j, x in enumerate(xs)]),
)


def bind_functions(e: Expr, functions: typing.Mapping[str, TestFunction]) -> Expr:
    if not functions or not e.has(AppliedUndef):
        return e

    bound = e.replace(
        lambda x: isinstance(x, AppliedUndef) and x.func.__name__ in functions,
        lambda x: functions[x.func.__name__](*x.args),
    )
    return bound.doit()


def _is_singular(value: Expr) -> bool:
    return value.has(sympy.zoo, sympy.nan, sympy.oo, -sympy.oo)


def eval_numeric(
    e: Expr,
    bindings: typing.Mapping[sympy.Symbol | str, complex | float],
    *,
    functions: typing.Mapping[str, TestFunction] | None = None,
    real: bool = False,
) -> complex:
    e = sympy.sympify(e)
    by_name = {(k if isinstance(k, str) else k.name): v for k, v in bindings.items()}

    e = bind_functions(e, functions or {})
    if missing := opaque_names(e):
        raise utils.UnboundSymbolError(
            f"Opaque function(s) {', '.join(sorted(missing))} have no binding."
        )
    if missing := free_names(e) - by_name.keys():
        raise utils.UnboundSymbolError(f"Unbound symbol(s): {', '.join(sorted(missing))}.")

    subs = {
        s: by_name[s.name] for s in e.free_symbols if isinstance(s, sympy.Symbol)
    }
    try:
        value = e.evalf(30, subs=subs) if subs else e.evalf(30)
    except (ZeroDivisionError, ValueError, TypeError) as err:
        raise utils.SingularPointError(str(err)) from None

    if _is_singular(value) or not value.is_number:
        raise utils.SingularPointError(f"{to_text(e)} is singular at {by_name}.")
    try:
        result = complex(value)
    except (TypeError, ValueError):
        raise utils.SingularPointError(f"{to_text(e)} is singular at {by_name}.") from None

    if not cmath.isfinite(result):
        raise utils.SingularPointError(f"{to_text(e)} is singular at {by_name}.")
    if real and abs(result.imag) > 1e-12 * (1 + abs(result)):
        raise utils.DomainError(f"{to_text(e)} is not real at {by_name}.")
    return result


def sample_point(
    names: typing.Iterable[str], assumptions: AssumptionSet, rng: np.random.Generator
) -> dict[str, float]:
    point: dict[str, float] = {}
    for name in sorted(names):
        low, high = assumptions.sampling_interval(name)
        point[name] = float(rng.uniform(low, high))
    return point


def equivalent(
    e1: Expr,
    e2: Expr,
    assumptions: AssumptionSet | None = None,
    *,
    samples: int | None = None,
    seed: int | None = None,
) -> bool:
    """Decides whether two expressions agree by probing them at random points.

    Points are drawn inside the assumption intervals with a fixed seed. Opaque
    functions are bound to each of ``TEST_FUNCTIONS`` in turn. Raises
    `InconclusiveComparison` when more than ``samples`` consecutive points are
    singular.
    """
    a = assumptions or EMPTY_ASSUMPTIONS
    samples = max(samples or utils.EQUIVALENCE_SAMPLES, 20)
    rng = np.random.default_rng(utils.EQUIVALENCE_SEED if seed is None else seed)

    e1, e2 = sympy.sympify(e1), sympy.sympify(e2)
    if e1 == e2:
        return True

    names = free_names(e1) | free_names(e2)
    opaque = sorted(opaque_names(e1) | opaque_names(e2))

    if opaque:
        bindings = [
            {name: (lambda *xs, f=f, k=k: f(*xs) + k) for k, name in enumerate(opaque)}
            for f in TEST_FUNCTIONS
        ]
    else:
        bindings = [{}]

    for functions in bindings:
        b1, b2 = bind_functions(e1, functions), bind_functions(e2, functions)
        agreed = 0
        singular_run = 0

        while agreed < samples:
            point = sample_point(names, a, rng)
            try:
                v1 = eval_numeric(b1, point)
                v2 = eval_numeric(b2, point)
            except utils.SingularPointError:
                singular_run += 1
                if singular_run > samples:
                    message = (
                        f"Hit {singular_run} singular samples in a row comparing"
                        f" {to_text(e1)} and {to_text(e2)}."
                    )
                    utils.logger.warning(message)
                    raise utils.InconclusiveComparison(message) from None
                continue

            singular_run = 0
            if abs(v1 - v2) > RELATIVE_TOLERANCE * (1 + abs(v1) + abs(v2)):
                return False
            agreed += 1

    return True
