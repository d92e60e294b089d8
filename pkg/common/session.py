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

import threading
import typing

import attrs
import sympy

import common.curvature as curvature
import common.fuzzy as fuzzy
import common.manifold as mf
import common.symexpr as sx
import common.tensor as tn
import common.utils as utils


@attrs.define(kw_only=True)
class TensorStats:
    name: str
    cached: int
    evaluations: int
    hits: int


class Session:
    """One manifold, its tensors and their caches.

    Component evaluation is serialized through ``lock``; separate sessions share
    nothing and can be used from different threads.
    """

    def __init__(self) -> None:
        self.lock = threading.RLock()
        self.registry = tn.CacheRegistry()
        self._manifold: mf.Manifold | None = None
        self.predefined: dict[str, tn.TensorField] = {}

    @property
    def manifold(self) -> mf.Manifold:
        if self._manifold is None:
            raise utils.ManifoldError("No manifold is open.")
        return self._manifold

    @property
    def is_open(self) -> bool:
        return self._manifold is not None

    @property
    def assumptions(self) -> sx.AssumptionSet:
        return self._manifold.assumptions if self._manifold else sx.EMPTY_ASSUMPTIONS

    def open(
        self,
        coords: typing.Sequence[sympy.Symbol | str],
        g: typing.Any,
        assumptions: sx.AssumptionSet | None = None,
    ) -> mf.Manifold:
        manifold = mf.open_manifold(coords, g, assumptions)

        with self.lock:
            self._manifold = manifold
            # user and derived tensors hold data of the previous manifold
            kept = set(self.predefined.values())
            dropped = [t for t in self.registry if t not in kept]
            for tensor in dropped:
                self.registry.unregister(tensor)
            if dropped:
                utils.logger.info(
                    "Dropped %s: defined on the previous manifold.",
                    ", ".join(t.name for t in dropped),
                )

            self.registry.clear_all()
            utils.logger.info("Cleared %s registered caches.", len(self.registry))
            self.predefined = curvature.install(self)

        return manifold

    def open_line_element(
        self,
        coords: typing.Sequence[str],
        form: str | sx.Expr,
        assumptions: sx.AssumptionSet | None = None,
    ) -> mf.Manifold:
        assumptions = assumptions or sx.AssumptionSet()
        symbols = [assumptions.symbol(c) for c in coords]
        if isinstance(form, str):
            form = sx.parse(form, assumptions)
        return self.open(symbols, mf.to_matrix(form, symbols), assumptions)

    def parse(self, text: str) -> sx.Expr:
        return sx.parse(text, self.assumptions)

    def simplify(self, e: sx.Expr, *, tidy: bool = True) -> sx.Expr:
        return sx.simplify(e, self.assumptions, tidy=tidy)

    def equivalent(self, e1: sx.Expr, e2: sx.Expr, **kwargs: typing.Any) -> bool:
        return sx.equivalent(e1, e2, self.assumptions, **kwargs)

    def metric(self, i: int, j: int) -> sx.Expr:
        return self.manifold.metric(i, j)

    def tensor(self, name: str) -> tn.TensorField:
        if found := self.registry.get(name):
            return found
        raise utils.UnknownTensorError(
            name, fuzzy.suggest_names(name, self.registry.names())
        )

    def __getattr__(self, name: str) -> tn.TensorField:
        # session.riemann, session.ricci, ... for the predefined fields
        predefined = self.__dict__.get("predefined", {})
        if name in predefined:
            return predefined[name]
        raise AttributeError(name)

    def define_tensor(
        self,
        name: str,
        base_fn: tn.BaseFn,
        rank: int,
        symmetries: typing.Iterable[tn.Symmetry] = (),
        base_valence: typing.Sequence[int] | None = None,
        **kwargs: typing.Any,
    ) -> tn.TensorField:
        return tn.define_tensor(
            self, name, base_fn, rank, symmetries, base_valence, **kwargs
        )

    def tensor_ext(
        self,
        matrix: typing.Any,
        valence: typing.Sequence[int],
        name: str | None = None,
        **kwargs: typing.Any,
    ) -> tn.TensorField:
        return tn.tensor_ext(self, matrix, valence, name, **kwargs)

    def scalar_field(self, e: sx.Expr | str, name: str | None = None) -> tn.TensorField:
        if isinstance(e, str):
            e = self.parse(e)
        return tn.tensor_ext(self, e, (), name)

    def vector_field(
        self,
        components: typing.Sequence[sx.Expr | str],
        valence: int = 1,
        name: str | None = None,
    ) -> tn.TensorField:
        values = [self.parse(c) if isinstance(c, str) else c for c in components]
        return tn.tensor_ext(self, values, (valence,), name)

    def associated(self, tensor: tn.TensorField) -> list[tuple[str, tn.IndexTuple]]:
        return tn.associated(self, tensor)

    def retreat(
        self,
        tensor: tn.TensorField,
        scope: typing.Literal["self", "associated"] = "self",
    ) -> None:
        tn.retreat(self, tensor, scope)

    def cache_stats(self) -> list[TensorStats]:
        return [
            TensorStats(
                name=t.name,
                cached=t.evaluated_count,
                evaluations=t.eval_count,
                hits=t.hits,
            )
            for t in self.registry
        ]
