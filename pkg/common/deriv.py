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

import common.symexpr as sx
import common.tensor as tn
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session


def _derived(
    session: "Session",
    name: str,
    parents: tuple[tn.TensorField, ...],
    build: typing.Callable[[], tn.TensorField],
) -> tn.TensorField:
    # the same derivative of the same tensor shares one cache
    existing = session.registry.get(name)
    if existing is not None and existing.name == name and existing.derived_from == parents:
        return existing

    tensor = build()
    session.registry.register(tensor)
    return tensor


def _replace(idx: tn.IndexTuple, slot: int, value: int) -> tn.IndexTuple:
    return idx[:slot] + (value,) + idx[slot + 1 :]


def _extended_symmetries(tensor: tn.TensorField) -> list[tn.Symmetry]:
    return [(perm + (tensor.rank + 1,), sign) for perm, sign in tensor.symmetries]


def covariant_d(session: "Session", tensor: tn.TensorField) -> tn.TensorField:
    """The covariant derivative of ``tensor`` as a new field, derivative index last.

    ``covariant_d(session, T)(i, j, m)`` is T_{ij;m}; apply twice for second
    derivatives.
    """

    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        manifold = session.manifold
        gamma = session.predefined["christoffel"]
        t_idx, m = idx[:-1], idx[-1]

        value = sx.diff(tensor.component(t_idx), manifold.coordinate(m))
        for k, e in enumerate(t_idx):
            for s in range(1, manifold.dim + 1):
                if e > 0:
                    connection = gamma(-s, m, e)
                    if connection != 0:
                        value -= connection * tensor.component(_replace(t_idx, k, s))
                else:
                    connection = gamma(e, m, s)
                    if connection != 0:
                        value += connection * tensor.component(_replace(t_idx, k, -s))
        return value

    name = f"covariantD[{tensor.name}]"
    return _derived(
        session,
        name,
        (tensor,),
        lambda: tn.TensorField(
            name,
            tensor.rank + 1,
            base_fn,
            session,
            (*tensor.base_valence, 1),
            _extended_symmetries(tensor),
            derived_from=(tensor,),
        ),
    )


def covariant_d2(
    session: "Session", tensor: tn.TensorField, idx: typing.Sequence[int], m: int, n: int
) -> sx.Expr:
    second = covariant_d(session, covariant_d(session, tensor))
    return second.component((*idx, m, n))


def partial_d(session: "Session", tensor: tn.TensorField) -> tn.TensorField:
    """Coordinate derivatives of the base-valence components. Not a tensor, so it
    cannot change valence."""

    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        return sx.diff(
            tensor.component(idx[:-1]), session.manifold.coordinate(idx[-1])
        )

    name = f"partialD[{tensor.name}]"
    return _derived(
        session,
        name,
        (tensor,),
        lambda: tn.TensorField(
            name,
            tensor.rank + 1,
            base_fn,
            session,
            (*tensor.base_valence, 1),
            _extended_symmetries(tensor),
            convertible=False,
            derived_from=(tensor,),
        ),
    )


def lie_d(
    session: "Session",
    vector: tn.TensorField,
    *,
    connection: typing.Literal["partial", "covariant"] = "partial",
) -> typing.Callable[[tn.TensorField], tn.TensorField]:
    """Returns the Lie derivative along ``vector`` as a function of the tensor.

    Both connections give the same field on a torsion-free manifold; the
    covariant form exists to check that.
    """
    if vector.rank != 1:
        raise utils.ArityError(
            f"Lie derivatives need a vector field, {vector.name} has rank {vector.rank}."
        )

    def for_tensor(tensor: tn.TensorField) -> tn.TensorField:
        if connection == "partial":
            d_tensor = partial_d(session, tensor)

            def d_vector(s: int, i: int) -> sx.Expr:
                return sx.diff(vector(-s), session.manifold.coordinate(i))

        else:
            d_tensor = covariant_d(session, tensor)
            nabla_vector = covariant_d(session, vector)

            def d_vector(s: int, i: int) -> sx.Expr:
                return nabla_vector(-s, i)

        def base_fn(idx: tn.IndexTuple) -> sx.Expr:
            dim = session.manifold.dim
            value = sympy.Integer(0)

            for s in range(1, dim + 1):
                upper = vector(-s)
                if upper != 0:
                    value += upper * d_tensor.component((*idx, s))

            for k, e in enumerate(idx):
                for s in range(1, dim + 1):
                    if e > 0:
                        factor = d_vector(s, e)
                        if factor != 0:
                            value += tensor.component(_replace(idx, k, s)) * factor
                    else:
                        factor = d_vector(-e, s)
                        if factor != 0:
                            value -= tensor.component(_replace(idx, k, -s)) * factor
            return value

        prefix = "lieD" if connection == "partial" else "lieDCovariant"
        name = f"{prefix}[{vector.name}][{tensor.name}]"
        return _derived(
            session,
            name,
            (vector, tensor),
            lambda: tn.TensorField(
                name,
                tensor.rank,
                base_fn,
                session,
                tensor.base_valence,
                tensor.symmetries,
                derived_from=(vector, tensor),
            ),
        )

    return for_tensor


def scalar_laplacian(session: "Session", f: sx.Expr | str | tn.TensorField) -> sx.Expr:
    if isinstance(f, tn.TensorField):
        scalar = f
    else:
        expr = session.parse(f) if isinstance(f, str) else f
        name = f"scalar[{sx.to_text(expr)}]"
        existing = session.registry.get(name)
        if existing is not None and existing.name == name:
            scalar = existing
        else:
            scalar = session.scalar_field(expr, name)

    second = covariant_d(session, covariant_d(session, scalar))
    return session.simplify(
        sympy.Add(*[second(i, -i) for i in range(1, session.manifold.dim + 1)])
    )
