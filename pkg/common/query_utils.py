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

import attrs
import sympy

import common.curvature as curvature
import common.deriv as deriv
import common.invariants as invariants
import common.models as models
import common.symexpr as sx
import common.tensor as tn
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session

CacheAction = typing.Literal["view", "associated", "stats", "retreat"]
CACHE_ACTIONS: tuple[str, ...] = typing.get_args(CacheAction)

# the scalar invariants the invariant command understands besides the CM set
EXTRA_INVARIANTS = {
    "kretschmann": curvature.kretschmann,
    "ricciscalar": curvature.ricci_scalar,
}


def evaluated_counts(session: "Session") -> dict[str, int]:
    return {t.name: t.evaluated_count for t in session.registry if t.evaluated_count}


def format_expr(session: "Session", e: sx.Expr) -> str:
    # complex results print as "a + b*I" with both parts simplified
    if not sympy.sympify(e).has(sympy.I):
        return sx.to_text(session.simplify(e))

    real, imag = sx.split_complex(e, session.assumptions)
    if imag == 0:
        return sx.to_text(real)
    imag_text = sx.to_text(sympy.I * imag)
    if real == 0:
        return imag_text
    if imag_text.startswith("-"):
        return f"{sx.to_text(real)} - {imag_text[1:]}"
    return f"{sx.to_text(real)} + {imag_text}"


def check_output(session: "Session", printed: str, value: sx.Expr, seed: int | None) -> bool:
    """Re-reads printed output and confirms it matches the library value."""
    return session.equivalent(session.parse(printed), value, seed=seed)


def verify(ctx: utils.CommandContext, printed: str, value: sx.Expr) -> int:
    # --check: exit 1 when the printed text does not read back as the same value
    if not ctx.args.check:
        return 0
    if check_output(ctx.session, printed, value, ctx.args.seed):
        ctx.warn(f"check ok: {printed}")
        return 0
    ctx.warn(f"check failed: {printed}")
    return 1


def component(
    session: "Session", tensor_name: str, indices: typing.Sequence[int]
) -> tuple[sx.Expr, models.ComponentReport]:
    tensor = session.tensor(tensor_name)
    value = tensor.component(indices)
    report = models.ComponentReport(
        tensor=tensor.name,
        indices=list(indices),
        expression=format_expr(session, value),
        evaluated_counts=evaluated_counts(session),
    )
    return value, report


def invariant_names(which: str) -> list[str]:
    lowered = which.lower()
    if lowered == "all":
        return list(invariants.CM_NAMES)
    if lowered in EXTRA_INVARIANTS:
        return [lowered]
    return [which.upper()]


def invariant(
    session: "Session", which: str
) -> list[tuple[sx.Expr, models.InvariantReport]]:
    results: list[tuple[sx.Expr, models.InvariantReport]] = []

    for name in invariant_names(which):
        if name in EXTRA_INVARIANTS:
            value = EXTRA_INVARIANTS[name](session)
            display = "kretschmann" if name == "kretschmann" else "ricciScalar"
        else:
            value = invariants.cm_invariant(session, name)
            display = name

        real, imag = sx.split_complex(value, session.assumptions)
        results.append(
            (
                value,
                models.InvariantReport(
                    invariant=display,
                    expression=format_expr(session, value),
                    real=sx.to_text(real),
                    imaginary=sx.to_text(imag),
                    evaluated_counts=evaluated_counts(session),
                ),
            )
        )

    return results


def laplacian(
    session: "Session", fn: str
) -> tuple[sx.Expr, models.LaplacianReport]:
    """The scalar Laplacian of ``fn``: a bare name means an opaque function of
    every coordinate, anything else is read as an expression."""
    manifold = session.manifold
    if fn.isidentifier() and fn not in {c.name for c in manifold.coords}:
        target = sx.opaque_function(fn, list(manifold.coords))
    else:
        target = session.parse(fn)

    value = deriv.scalar_laplacian(session, target)
    return value, models.LaplacianReport(
        function=sx.to_text(target), expression=format_expr(session, value)
    )


def cache(
    session: "Session",
    tensor_name: str | None,
    action: CacheAction,
    scope: typing.Literal["self", "associated"] = "self",
) -> models.CacheReport:
    if action == "stats":
        stats = session.cache_stats()
        if tensor_name:
            wanted = session.tensor(tensor_name).name
            stats = [s for s in stats if s.name == wanted]
        return models.CacheReport(
            tensor=tensor_name or "*",
            action=action,
            stats=[attrs.asdict(s) for s in stats],
        )

    if not tensor_name:
        raise utils.ArityError(f"cache --action {action} needs --tensor.")
    tensor = session.tensor(tensor_name)

    match action:
        case "view":
            entries = [(tensor.name, key) for key in tn.cacheview(tensor)]
        case "associated":
            entries = session.associated(tensor)
        case "retreat":
            session.retreat(tensor, scope)
            entries = []
        case _:
            raise utils.ArityError(
                f"Unknown cache action {action!r}; use one of {', '.join(CACHE_ACTIONS)}."
            )

    return models.CacheReport(
        tensor=tensor.name,
        action=action,
        entries=[models.CacheEntry(name, list(key)) for name, key in entries],
    )


def format_cache(report: models.CacheReport) -> list[str]:
    if report.action == "stats":
        return [
            f"{s['name']}: cached={s['cached']} evaluations={s['evaluations']}"
            f" hits={s['hits']}"
            for s in report.stats
        ]
    if report.action == "retreat":
        return [f"Retreated {report.tensor}."]
    if report.action == "view":
        keys = (f"({', '.join(map(str, e.indices))})" for e in report.entries)
        return [f"[{', '.join(keys)}]"]
    return [f"{e.tensor} {tuple(e.indices)}" for e in report.entries]
