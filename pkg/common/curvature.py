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

# Predefined curvature fields. Every base function reads other fields through
# session.predefined at evaluation time, so the same objects keep working after
# the session opens a new manifold.
#
# Conventions:
#   christoffel(-a, b, c) = Gamma^a_{bc}, symmetric in b and c
#   riemann(-a, b, c, d)  = R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
#                           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
#   ricci(i, j)           = R^s_{isj}
# which gives riemann(1, 2, 1, 2) = -2M/r^3 on Schwarzschild.

import typing

import sympy

import common.symexpr as sx
import common.tensor as tn
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session

RIEMANN_SIGN = 1


def require_dim(what: str, dim: int) -> typing.Callable[[int], None]:
    def check(actual: int) -> None:
        if actual != dim:
            raise utils.DimensionError(what, f"dimension {dim}")

    return check


def _weyl_dim_check(actual: int) -> None:
    if actual < 3:
        raise utils.DimensionError("weyl", "dimension >= 3")


def permutation_sign(idx: typing.Sequence[int]) -> int:
    if len(set(idx)) != len(idx):
        return 0
    inversions = sum(
        1 for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] > idx[j]
    )
    return -1 if inversions % 2 else 1


def _metric_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        return session.manifold.metric(*idx)

    return base_fn


def _christoffel_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        manifold = session.manifold
        a, b, c = -idx[0], idx[1], idx[2]
        xb, xc = manifold.coordinate(b), manifold.coordinate(c)

        total = sympy.Integer(0)
        for s in range(1, manifold.dim + 1):
            g_inv = manifold.metric(-a, -s)
            if g_inv == 0:
                continue
            total += g_inv * (
                sx.diff(manifold.metric(s, c), xb)
                + sx.diff(manifold.metric(s, b), xc)
                - sx.diff(manifold.metric(b, c), manifold.coordinate(s))
            )
        return total / 2

    return base_fn


def _riemann_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        manifold = session.manifold
        gamma = session.predefined["christoffel"]
        a, b, c, d = -idx[0], idx[1], idx[2], idx[3]

        value = sx.diff(gamma(-a, d, b), manifold.coordinate(c)) - sx.diff(
            gamma(-a, c, b), manifold.coordinate(d)
        )
        for e in range(1, manifold.dim + 1):
            value += gamma(-a, c, e) * gamma(-e, d, b)
            value -= gamma(-a, d, e) * gamma(-e, c, b)
        return RIEMANN_SIGN * value

    return base_fn


def _ricci_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        i, j = idx
        riemann = session.predefined["riemann"]
        return sympy.Add(
            *[riemann(-s, i, s, j) for s in range(1, session.manifold.dim + 1)]
        )

    return base_fn


def _trace_fn(session: "Session", name: str) -> tn.BaseFn:
    def base_fn(_: tn.IndexTuple) -> sx.Expr:
        return tn.contract(
            "^i^j,_i_j", session.predefined["metric"], session.predefined[name]
        )

    return base_fn


def _trace_adjusted_fn(session: "Session", factor: sx.Expr) -> tn.BaseFn:
    # R_ij - factor * R * g_ij
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        scalar = session.predefined["ricciScalar"]()
        ricci = session.predefined["ricci"]
        return ricci(*idx) - factor * scalar * session.metric(*idx)

    return base_fn


def _weyl_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        n = session.manifold.dim
        if n == 3:
            return sympy.Integer(0)

        a, b, c, d = idx
        g = session.metric
        ricci = session.predefined["ricci"]
        scalar = session.predefined["ricciScalar"]()

        value = session.predefined["riemann"](a, b, c, d)
        value -= (
            g(a, c) * ricci(d, b)
            - g(a, d) * ricci(c, b)
            - g(b, c) * ricci(d, a)
            + g(b, d) * ricci(c, a)
        ) / (n - 2)
        value += scalar * (g(a, c) * g(d, b) - g(a, d) * g(c, b)) / ((n - 1) * (n - 2))
        return value

    return base_fn


def _levi_civita_fn(session: "Session") -> tn.BaseFn:
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        return session.manifold.sqrt_abs_det * permutation_sign(idx)

    return base_fn


def _dual_weyl_fn(session: "Session") -> tn.BaseFn:
    # left dual: (1/2) eps_ab^ef C_efcd
    def base_fn(idx: tn.IndexTuple) -> sx.Expr:
        a, b, c, d = idx
        return (
            tn.contract(
                "_a_b^e^f,_e_f_c_d",
                session.predefined["leviCivita"],
                session.predefined["weyl"],
                a=a,
                b=b,
                c=c,
                d=d,
            )
            / 2
        )

    return base_fn


def _kretschmann_fn(session: "Session") -> tn.BaseFn:
    def base_fn(_: tn.IndexTuple) -> sx.Expr:
        riemann = session.predefined["riemann"]
        return tn.contract("_i_j_m_n,^i^j^m^n", riemann, riemann)

    return base_fn


def _levi_civita(session: "Session") -> tn.TensorField:
    dim = session.manifold.dim
    return tn.TensorField(
        "leviCivita",
        dim,
        _levi_civita_fn(session),
        session,
        None,  # type: ignore
        [tn.antisymmetric(k, k + 1, dim) for k in range(1, dim)],
    )


def _build(session: "Session") -> dict[str, tn.TensorField]:
    def field(
        name: str, fn: tn.BaseFn, rank: int, *args: typing.Any, **kwargs: typing.Any
    ) -> tn.TensorField:
        return tn.TensorField(name, rank, fn, session, *args, **kwargs)

    symmetric_pair = [tn.symmetric(1, 2, 2)]
    dual_symmetries = [tn.antisymmetric(1, 2, 4), tn.antisymmetric(3, 4, 4)]

    metric = field(
        "metric", _metric_fn(session), 2, None, symmetric_pair, any_valence=True
    )
    christoffel = field(
        "christoffel",
        _christoffel_fn(session),
        3,
        (-1, 1, 1),
        [tn.symmetric(2, 3, 3)],
        convertible=False,
    )
    riemann = field(
        "riemann",
        _riemann_fn(session),
        4,
        (-1, 1, 1, 1),
        tn.RIEMANN_SYMMETRIES,
    )
    ricci = field("ricci", _ricci_fn(session), 2, None, symmetric_pair)
    ricci_scalar = field("ricciScalar", _trace_fn(session, "ricci"), 0)
    einstein = field(
        "einstein",
        _trace_adjusted_fn(session, sympy.Rational(1, 2)),
        2,
        None,
        symmetric_pair,
    )
    plebanski = field(
        "plebanski",
        _trace_adjusted_fn(session, sympy.Rational(1, 4)),
        2,
        None,
        symmetric_pair,
        dimension_check=require_dim("plebanski", 4),
    )
    weyl = field(
        "weyl",
        _weyl_fn(session),
        4,
        None,
        tn.RIEMANN_SYMMETRIES,
        dimension_check=_weyl_dim_check,
    )
    dual_weyl = field(
        "dualWeyl",
        _dual_weyl_fn(session),
        4,
        None,
        dual_symmetries,
        dimension_check=require_dim("dualWeyl", 4),
    )
    kretschmann = field("kretschmann", _kretschmann_fn(session), 0)

    return {
        t.name: t
        for t in (
            metric,
            christoffel,
            riemann,
            ricci,
            ricci_scalar,
            einstein,
            plebanski,
            weyl,
            dual_weyl,
            kretschmann,
        )
    }


def install(session: "Session") -> dict[str, tn.TensorField]:
    """Registers the predefined fields for the session's current manifold."""
    fields = dict(session.predefined) or _build(session)

    levi = fields.get("leviCivita")
    if levi is None or levi.rank != session.manifold.dim:
        if levi is not None:
            session.registry.unregister(levi)
        fields["leviCivita"] = _levi_civita(session)

    for tensor in fields.values():
        if tensor not in session.registry:
            session.registry.register(tensor, replace_quietly=True)
    return fields


def christoffel_second(session: "Session", a: int, b: int, c: int) -> sx.Expr:
    return session.predefined["christoffel"](a, b, c)


def ricci_scalar(session: "Session") -> sx.Expr:
    return session.predefined["ricciScalar"]()


def kretschmann(session: "Session") -> sx.Expr:
    return session.predefined["kretschmann"]()
