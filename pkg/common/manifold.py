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

import typing
from functools import cached_property

import attrs
import numpy as np
import sympy
from sympy.core.function import AppliedUndef
from sympy.polys.polyerrors import PolificationFailed, PolynomialError

import common.symexpr as sx
import common.utils as utils

SINGULAR_SAMPLES = 3


@attrs.define(eq=False)
class Manifold:
    coords: tuple[sympy.Symbol, ...]
    g_cov: sympy.ImmutableMatrix
    assumptions: sx.AssumptionSet = attrs.field(factory=sx.AssumptionSet)

    @property
    def dim(self) -> int:
        return len(self.coords)

    @cached_property
    def det(self) -> sx.Expr:
        return sx.simplify(self.g_cov.det(method="berkowitz"), self.assumptions)

    @cached_property
    def sqrt_abs_det(self) -> sx.Expr:
        return sx.simplify(sympy.sqrt(sympy.Abs(self.det)), self.assumptions)

    @cached_property
    def g_inv(self) -> sympy.ImmutableMatrix:
        if self.g_cov.is_diagonal():
            return sympy.ImmutableMatrix(
                sympy.diag(
                    *[
                        sx.simplify(1 / self.g_cov[i, i], self.assumptions)
                        for i in range(self.dim)
                    ]
                )
            )

        adjugate = self.g_cov.adjugate(method="berkowitz")
        return sympy.ImmutableMatrix(
            self.dim,
            self.dim,
            lambda i, j: sx.simplify(adjugate[i, j] / self.det, self.assumptions),
        )

    def check_index(self, index: int) -> int:
        if index == 0 or abs(index) > self.dim:
            raise utils.IndexRangeError(
                f"Index {index} is out of range for a {self.dim}-dimensional manifold."
            )
        return abs(index) - 1

    def metric(self, i: int, j: int) -> sx.Expr:
        a, b = self.check_index(i), self.check_index(j)
        if i > 0 and j > 0:
            return self.g_cov[a, b]
        if i < 0 and j < 0:
            return self.g_inv[a, b]
        return sympy.Integer(1 if a == b else 0)

    def coordinate(self, index: int) -> sympy.Symbol:
        return self.coords[self.check_index(index)]

    def sample(self, rng: np.random.Generator) -> dict[str, float]:
        names = {c.name for c in self.coords}
        for entry in self.g_cov:
            names |= sx.free_names(entry)
        return sx.sample_point(names, self.assumptions, rng)


def _check_singular(manifold: Manifold) -> None:
    if manifold.det == 0:
        raise utils.SingularMetricError()

    rng = np.random.default_rng(utils.EQUIVALENCE_SEED)
    for _ in range(SINGULAR_SAMPLES):
        try:
            value = sx.eval_numeric(
                manifold.det, manifold.sample(rng), functions=_sample_functions(manifold.det)
            )
        except utils.SingularPointError:
            continue
        if abs(value) > 1e-12:
            return
    raise utils.SingularMetricError()


def _sample_functions(e: sx.Expr) -> dict[str, sx.TestFunction]:
    return dict.fromkeys(sx.opaque_names(e), sx.TEST_FUNCTIONS[0])


def _check_inverse(manifold: Manifold) -> None:
    product = manifold.g_inv * manifold.g_cov
    for i in range(manifold.dim):
        for j in range(manifold.dim):
            entry = sx.simplify(product[i, j], manifold.assumptions)
            if entry != (1 if i == j else 0):
                utils.logger.warning(
                    "Inverse metric entry (%s, %s) did not simplify to delta: %s",
                    i + 1,
                    j + 1,
                    sx.to_text(entry),
                )


def open_manifold(
    coords: typing.Sequence[sympy.Symbol | str],
    g: typing.Sequence[typing.Sequence[sx.Expr]] | sympy.MatrixBase,
    assumptions: sx.AssumptionSet | None = None,
) -> Manifold:
    """Validates a coordinate list and metric and returns the manifold they declare."""
    assumptions = assumptions or sx.AssumptionSet()
    symbols = tuple(
        assumptions.symbol(c) if isinstance(c, str) else assumptions.attach(c)
        for c in coords
    )

    if len({s.name for s in symbols}) != len(symbols):
        raise utils.ManifoldError("repeated coordinate name")

    matrix = sympy.Matrix(g)
    if matrix.rows != matrix.cols or matrix.rows != len(symbols):
        raise utils.ManifoldError(
            f"metric must be {len(symbols)}x{len(symbols)}, got"
            f" {matrix.rows}x{matrix.cols}"
        )

    g_cov = sympy.ImmutableMatrix(
        matrix.rows,
        matrix.cols,
        lambda i, j: sx.simplify(sympy.sympify(matrix[i, j]), assumptions),
    )
    for i in range(g_cov.rows):
        for j in range(i + 1, g_cov.cols):
            if sx.simplify(g_cov[i, j] - g_cov[j, i], assumptions) != 0:
                raise utils.ManifoldError(
                    f"asymmetric metric: entry ({i + 1},{j + 1}) differs from"
                    f" ({j + 1},{i + 1})"
                )

    manifold = Manifold(symbols, g_cov, assumptions)
    _check_singular(manifold)
    if utils.FEATURE("CHECK_METRIC_INVERSE"):
        _check_inverse(manifold)

    utils.logger.info(
        "Opened a %s-dimensional manifold in coordinates %s.",
        manifold.dim,
        ", ".join(s.name for s in symbols),
    )
    return manifold


def to_matrix(
    form: sx.Expr, coords: typing.Sequence[sympy.Symbol]
) -> sympy.ImmutableMatrix:
    """Reads the metric matrix off a line element written with ``Dt[x]`` tokens."""
    by_name = {c.name: i for i, c in enumerate(coords)}
    tokens = [sx.Dt(c) for c in coords]

    for token in form.atoms(AppliedUndef):
        if token.func == sx.Dt and (
            not isinstance(token.args[0], sympy.Symbol)
            or token.args[0].name not in by_name
        ):
            raise utils.ManifoldError(
                f"differential token {sx.to_text(token)} matches no coordinate"
            )

    # the form may have been parsed with other symbol assumptions
    form = form.xreplace(
        {
            t: sx.Dt(coords[by_name[t.args[0].name]])
            for t in form.atoms(AppliedUndef)
            if t.func == sx.Dt
        }
    )

    try:
        poly = sympy.Poly(sympy.expand(form), *tokens)
    except (PolynomialError, PolificationFailed):
        raise utils.ManifoldError(
            "line element is not a polynomial in the differentials"
        ) from None

    dim = len(coords)
    entries = [[sympy.Integer(0)] * dim for _ in range(dim)]
    for monomial, coeff in poly.terms():
        if sum(monomial) != 2:
            raise utils.ManifoldError("line element must have degree 2 in differentials")

        present = [i for i, power in enumerate(monomial) for _ in range(power)]
        i, j = present
        if i == j:
            entries[i][i] += coeff
        else:
            entries[i][j] += coeff / 2
            entries[j][i] += coeff / 2

    return sympy.ImmutableMatrix([[sx.simplify(e) for e in row] for row in entries])


def form_of(g: sympy.MatrixBase, coords: typing.Sequence[sympy.Symbol]) -> sx.Expr:
    return sympy.Add(
        *[
            g[i, j] * sx.Dt(coords[i]) * sx.Dt(coords[j])
            for i in range(len(coords))
            for j in range(len(coords))
        ]
    )
