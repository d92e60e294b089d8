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

import sympy

import common.deriv as deriv
import common.symexpr as sx
import common.tensor as tn
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.manifold import Manifold
    from common.session import Session


def _require_vector(vector: tn.TensorField) -> None:
    if vector.rank != 1:
        raise utils.ArityError(
            f"Hypersurfaces need a vector field, {vector.name} has rank {vector.rank}."
        )


def vector_squared(session: "Session", vector: tn.TensorField) -> sx.Expr:
    """v_i v^i, simplified. Raises `NullVectorError` when the norm vanishes, either
    symbolically or at every sampled point."""
    _require_vector(vector)
    value = session.simplify(tn.contract("_i,^i", vector, vector))

    if value == 0:
        raise utils.NullVectorError(vector.name)
    try:
        if session.equivalent(value, sympy.Integer(0)):
            raise utils.NullVectorError(vector.name)
    except utils.InconclusiveComparison as e:
        utils.logger.warning("Could not sample the norm of %s: %s", vector.name, e)

    return value


def _norm_of(session: "Session", vector: tn.TensorField) -> typing.Callable[[], sx.Expr]:
    # recomputed only when the session has moved to another manifold
    memo: dict[str, typing.Any] = {}

    def norm() -> sx.Expr:
        manifold: Manifold = session.manifold
        if memo.get("manifold") is not manifold:
            memo["value"] = vector_squared(session, vector)
            memo["manifold"] = manifold
        return memo["value"]

    return norm


def _registered(
    session: "Session", name: str, parents: tuple[tn.TensorField, ...]
) -> tn.TensorField | None:
    existing = session.registry.get(name)
    if existing is not None and existing.name == name and existing.derived_from == parents:
        return existing
    return None


def induced_metric(session: "Session", vector: tn.TensorField) -> tn.TensorField:
    """The first fundamental form h_ij = g_ij - v_i v_j / (v_s v^s) of the
    hypersurfaces orthogonal to ``vector``."""
    _require_vector(vector)
    name = f"inducedMetric[{vector.name}]"
    if existing := _registered(session, name, (vector,)):
        return existing

    norm = _norm_of(session, vector)
    norm()

    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        i, j = idx
        return session.metric(i, j) - vector(i) * vector(j) / norm()

    return tn.define_tensor(
        session,
        name,
        base_fn,
        2,
        [tn.symmetric(1, 2, 2)],
        derived_from=(vector,),
    )


def unit_normal(session: "Session", vector: tn.TensorField) -> tn.TensorField:
    _require_vector(vector)
    name = f"unitNormal[{vector.name}]"
    if existing := _registered(session, name, (vector,)):
        return existing

    norm = _norm_of(session, vector)
    norm()

    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        return vector(*idx) / sympy.sqrt(sympy.Abs(norm()))

    return tn.define_tensor(
        session, name, base_fn, 1, base_valence=(1,), derived_from=(vector,)
    )


def second_fundamental_form(session: "Session", vector: tn.TensorField) -> tn.TensorField:
    """K_ij = h_i^a h_j^b u_b;a with u the unit normal along ``vector``.

    Symmetric only when ``vector`` is hypersurface orthogonal, so no symmetry is
    declared.
    """
    _require_vector(vector)
    name = f"secondFundamentalForm[{vector.name}]"
    if existing := _registered(session, name, (vector,)):
        return existing

    h = induced_metric(session, vector)
    nabla_u = deriv.covariant_d(session, unit_normal(session, vector))

    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        i, j = idx
        return tn.contract("_i^a,_j^b,_b_a", h, h, nabla_u, i=i, j=j)

    return tn.define_tensor(session, name, base_fn, 2, derived_from=(vector,))
