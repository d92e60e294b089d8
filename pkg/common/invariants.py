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

# The Carminati-McLenaghan invariants, written as sums of contractions.
# S is the Plebanski (trace-free Ricci) tensor, C the Weyl tensor and D its
# left dual. Each invariant is a rank-0 registered field, so repeated requests
# are cached and reopening the manifold clears them with everything else.

import typing

import sympy

import common.curvature as curvature
import common.symexpr as sx
import common.tensor as tn
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session

I = sympy.I
_FIELDS = {"S": "plebanski", "C": "weyl", "D": "dualWeyl"}


class Term(typing.NamedTuple):
    coefficient: sx.Expr
    pattern: str
    factors: str


def _terms(coefficient: sx.Expr, pattern: str, *factors: str) -> list[Term]:
    return [Term(coefficient, pattern, f) for f in factors]


_MIXED_2 = "^b^c,_e_f,_a_b_c_d,^a^e^f^d"
_MIXED_4 = "^a^g,^c_d,^e^f,_a_c^d^b,_b_e_f_g"
_MIXED_5 = "^b^c,^e^f,^a^g^h^d,_a_b_c_d,_g_e_f_h"

CM_TERMS: dict[str, list[Term]] = {
    "R1": _terms(sympy.Rational(1, 4), "^a_b,^b_a", "SS"),
    "R2": _terms(sympy.Rational(-1, 8), "^a_b,^b_c,^c_a", "SSS"),
    "R3": _terms(sympy.Rational(1, 16), "^a_b,^b_c,^c_d,^d_a", "SSSS"),
    "W1": [
        Term(sympy.Rational(1, 8), "_a_b_c_d,^a^b^c^d", "CC"),
        Term(I / 8, "_a_b_c_d,^a^b^c^d", "DC"),
    ],
    "W2": [
        # the dual term keeps the index placement of the real term; only C -> D changes
        Term(sympy.Rational(-1, 16), "_a_b^c^d,_c_d^e^f,_e_f^a^b", "CCC"),
        Term(-I / 16, "_a_b^c^d,_c_d^e^f,_e_f^a^b", "DCC"),
    ],
    "M1": [
        Term(sympy.Rational(1, 8), "^a^d,^b^c,_a_b_c_d", "SSC"),
        Term(-I / 8, "^a^d,^b^c,_a_b_c_d", "SSD"),
    ],
    "M2": [
        Term(I / 8, "_a_b_c_d,^b^c,_e_f,^a^e^f^d", "DSSC"),
        Term(sympy.Rational(1, 16), _MIXED_2, "SSCC"),
        Term(sympy.Rational(-1, 16), _MIXED_2, "SSDD"),
    ],
    "M3": _terms(sympy.Rational(1, 16), _MIXED_2, "SSCC", "SSDD"),
    "M4": _terms(sympy.Rational(-1, 32), _MIXED_4, "SSSCC", "SSSDD"),
    "M5": [
        Term(I / 32, _MIXED_5, "SSDDD"),
        Term(I / 32, _MIXED_5, "SSDCC"),
        Term(sympy.Rational(1, 32), _MIXED_5, "SSCDD"),
        Term(sympy.Rational(1, 32), _MIXED_5, "SSCCC"),
    ],
}

CM_NAMES: tuple[str, ...] = tuple(CM_TERMS)


def _invariant_fn(session: "Session", which: str) -> tn.BaseFn:
    def base_fn(_: tn.IndexTuple) -> sx.Expr:
        total = sympy.Integer(0)
        for term in CM_TERMS[which]:
            operands = [session.predefined[_FIELDS[f]] for f in term.factors]
            total += term.coefficient * tn.contract(term.pattern, *operands)
        return total

    return base_fn


def cm_field(session: "Session", which: str) -> tn.TensorField:
    if which not in CM_TERMS:
        raise utils.UnknownTensorError(which, [n for n in CM_NAMES if n[0] == which[:1].upper()])

    name = f"CMinv{which}"
    existing = session.registry.get(name)
    if existing is not None and existing.name == name:
        return existing

    return tn.define_tensor(
        session,
        name,
        _invariant_fn(session, which),
        0,
        dimension_check=curvature.require_dim("CM invariants", 4),
    )


def cm_invariant(session: "Session", which: str) -> sx.Expr:
    return cm_field(session, which.upper()).component(())


def cm_all(session: "Session") -> dict[str, sx.Expr]:
    return {which: cm_invariant(session, which) for which in CM_NAMES}
