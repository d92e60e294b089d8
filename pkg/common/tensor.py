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

import itertools
import re
import typing
import warnings

import attrs
import sympy

import common.symexpr as sx
import common.utils as utils
from common.classes import NamedSet

if typing.TYPE_CHECKING:
    from common.session import Session

IndexTuple: typing.TypeAlias = tuple[int, ...]
# a 1-based permutation of the slots and the sign it multiplies the component by
Symmetry: typing.TypeAlias = tuple[tuple[int, ...], int]
BaseFn: typing.TypeAlias = typing.Callable[[IndexTuple], sx.Expr]


def swap(i: int, j: int, rank: int) -> tuple[int, ...]:
    perm = list(range(1, rank + 1))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return tuple(perm)


def symmetric(i: int, j: int, rank: int) -> Symmetry:
    return swap(i, j, rank), 1


def antisymmetric(i: int, j: int, rank: int) -> Symmetry:
    return swap(i, j, rank), -1


RIEMANN_SYMMETRIES: tuple[Symmetry, ...] = (
    antisymmetric(1, 2, 4),
    antisymmetric(3, 4, 4),
    ((3, 4, 1, 2), 1),
)


def valence_of(idx: IndexTuple) -> IndexTuple:
    return tuple(1 if e > 0 else -1 for e in idx)


def _symmetry_group(
    symmetries: typing.Iterable[Symmetry], rank: int
) -> list[tuple[tuple[int, ...], int]]:
    generators: list[tuple[tuple[int, ...], int]] = []
    for perm, sign in symmetries:
        if sorted(perm) != list(range(1, rank + 1)) or sign not in {1, -1}:
            raise utils.ArityError(
                f"Symmetry {perm} with sign {sign} is not a signed permutation of"
                f" 1..{rank}."
            )
        generators.append((tuple(p - 1 for p in perm), sign))

    identity = tuple(range(rank))
    group = {identity: 1}
    frontier = [identity]
    while frontier:
        current = frontier.pop()
        for gen, sign in generators:
            composed = tuple(current[gen[k]] for k in range(rank))
            if composed not in group:
                group[composed] = group[current] * sign
                frontier.append(composed)

    return list(group.items())


@attrs.define(eq=False)
class TensorField:
    """A named component function over signed index tuples, memoized per session.

    Positive entries are covariant slots, negative entries contravariant ones.
    Components are computed on demand: a request is canonicalized under the
    declared symmetries, looked up in the cache and only then computed, either
    from ``base_fn`` at the base valence or by contracting base-valence
    components with the metric.
    """

    name: str
    rank: int
    base_fn: BaseFn = attrs.field(repr=False)
    session: "Session" = attrs.field(repr=False)
    base_valence: IndexTuple = attrs.field(default=None)
    symmetries: tuple[Symmetry, ...] = attrs.field(default=(), converter=tuple)
    convertible: bool = attrs.field(default=True, kw_only=True)
    any_valence: bool = attrs.field(default=False, kw_only=True)
    derived_from: tuple["TensorField", ...] = attrs.field(
        default=(), converter=tuple, kw_only=True, repr=False
    )
    dimension_check: typing.Callable[[int], None] | None = attrs.field(
        default=None, kw_only=True, repr=False
    )

    cache: dict[IndexTuple, sx.Expr] = attrs.field(factory=dict, init=False, repr=False)
    eval_count: int = attrs.field(default=0, init=False)
    hits: int = attrs.field(default=0, init=False)
    _group: list[tuple[tuple[int, ...], int]] = attrs.field(init=False, repr=False)
    _canonical: dict[IndexTuple, tuple[IndexTuple, int]] = attrs.field(
        factory=dict, init=False, repr=False
    )

    def __attrs_post_init__(self) -> None:
        if self.base_valence is None:
            self.base_valence = (1,) * self.rank
        self.base_valence = tuple(self.base_valence)
        if len(self.base_valence) != self.rank or any(
            v not in {1, -1} for v in self.base_valence
        ):
            raise utils.ArityError(
                f"Valence {self.base_valence} does not fit a rank-{self.rank} tensor."
            )
        self._group = _symmetry_group(self.symmetries, self.rank)

    def __call__(self, *idx: int) -> sx.Expr:
        return self.component(idx)

    def canonicalize(self, idx: IndexTuple) -> tuple[IndexTuple, int]:
        """Returns the least tuple in the symmetry orbit of ``idx`` and the sign
        relating the two components. The sign is 0 when the symmetries force the
        component to vanish."""
        if cached := self._canonical.get(idx):
            return cached

        pattern = valence_of(idx)
        best, best_sign = idx, 1
        vanishes = False

        for perm, sign in self._group:
            # only permutations that keep every slot's valence apply
            if any(pattern[perm[k]] != pattern[k] for k in range(self.rank)):
                continue
            image = tuple(idx[perm[k]] for k in range(self.rank))
            if image == idx and sign == -1:
                vanishes = True
            if image < best:
                best, best_sign = image, sign

        result = (best, 0 if vanishes else best_sign)
        self._canonical[idx] = result
        return result

    def _check(self, idx: IndexTuple) -> None:
        if self not in self.session.registry:
            # replaced, or dropped when the manifold was reopened
            raise utils.UnknownTensorError(self.name)
        if len(idx) != self.rank:
            raise utils.ArityError(
                f"{self.name} takes {self.rank} indices, got {len(idx)}."
            )
        manifold = self.session.manifold
        for e in idx:
            manifold.check_index(e)
        if self.dimension_check is not None:
            self.dimension_check(manifold.dim)

    def component(self, idx: typing.Sequence[int]) -> sx.Expr:
        idx = tuple(idx)
        self._check(idx)

        with self.session.lock:
            key, sign = self.canonicalize(idx)
            if key in self.cache:
                self.hits += 1
                return self.cache[key] * sign

            if sign == 0:
                value = sympy.Integer(0)
            elif self.any_valence or valence_of(key) == self.base_valence:
                value = self._evaluate(key)
            else:
                value = self._convert(key)

            self.cache[key] = value
            return value * sign

    def _evaluate(self, key: IndexTuple) -> sx.Expr:
        self.eval_count += 1
        if utils.FEATURE("LOG_EVALUATIONS"):
            utils.logger.debug("Evaluating %s%s.", self.name, key)
        return self.session.simplify(self.base_fn(key), tidy=False)

    def _convert(self, key: IndexTuple) -> sx.Expr:
        if not self.convertible:
            raise utils.IndexRangeError(
                f"{self.name} is only defined at valence {self.base_valence}."
            )

        manifold = self.session.manifold
        options: list[list[tuple[int, sx.Expr]]] = []
        for e, base in zip(key, self.base_valence, strict=True):
            if (e > 0) == (base > 0):
                options.append([(e, sympy.Integer(1))])
                continue

            slot: list[tuple[int, sx.Expr]] = []
            for s in range(1, manifold.dim + 1):
                # contravariant request: raise with g^{|e| s}; covariant: lower with g_{e s}
                factor = manifold.metric(e, -s if e < 0 else s)
                if factor != 0:
                    slot.append((s if e < 0 else -s, factor))
            options.append(slot)

        total = sympy.Integer(0)
        for choice in itertools.product(*options):
            factor = sympy.Mul(*[f for _, f in choice])
            total += factor * self.component(tuple(i for i, _ in choice))
        return self.session.simplify(total, tidy=False)

    def cache_view(self) -> list[IndexTuple]:
        return list(self.cache)

    @property
    def evaluated_count(self) -> int:
        return len(self.cache)

    def retreat(self) -> None:
        self.cache.clear()
        self.eval_count = 0
        self.hits = 0

    def ancestors(self) -> set["TensorField"]:
        found: set[TensorField] = set()
        stack = list(self.derived_from)
        while stack:
            parent = stack.pop()
            if parent not in found:
                found.add(parent)
                stack.extend(parent.derived_from)
        return found


class CacheRegistry:
    """Every memoizing tensor of a session, so caches can be cleared together."""

    def __init__(self) -> None:
        self._tensors: NamedSet[TensorField] = NamedSet()

    def __iter__(self) -> typing.Iterator[TensorField]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def __contains__(self, tensor: object) -> bool:
        return tensor in self._tensors

    def names(self) -> list[str]:
        return self._tensors.names()

    def get(self, name: str) -> TensorField | None:
        return self._tensors.get(name)

    def register(self, tensor: TensorField, *, replace_quietly: bool = False) -> None:
        existing = self._tensors.get(tensor.name, fold=False)
        if existing is tensor:
            return
        if existing is not None and not replace_quietly:
            warnings.warn(
                f"Tensor {tensor.name!r} is already defined; replacing it.",
                utils.DuplicateTensorWarning,
                stacklevel=3,
            )
            utils.logger.warning("Replacing tensor %s.", tensor.name)

        if (displaced := self._tensors.add(tensor)) is not None:
            displaced.retreat()

    def unregister(self, tensor: TensorField) -> None:
        tensor.retreat()
        self._tensors.discard(tensor)

    def descendants(self, tensor: TensorField) -> list[TensorField]:
        return [t for t in self._tensors if tensor in t.ancestors()]

    def clear_all(self) -> None:
        for tensor in self._tensors:
            tensor.retreat()


def component(tensor: TensorField, idx: typing.Sequence[int]) -> sx.Expr:
    return tensor.component(idx)


def define_tensor(
    session: "Session",
    name: str,
    base_fn: BaseFn,
    rank: int,
    symmetries: typing.Iterable[Symmetry] = (),
    base_valence: typing.Sequence[int] | None = None,
    **kwargs: typing.Any,
) -> TensorField:
    tensor = TensorField(
        name,
        rank,
        base_fn,
        session,
        tuple(base_valence) if base_valence is not None else None,  # type: ignore
        tuple(symmetries),
        **kwargs,
    )
    session.registry.register(tensor)
    return tensor


def _check_shape(matrix: typing.Any, depth: int, dim: int) -> None:
    if depth == 0:
        if isinstance(matrix, list | tuple):
            raise utils.ArityError("tensorExt data is nested deeper than its valence.")
        return
    if not isinstance(matrix, (list, tuple, sympy.MatrixBase)) or len(matrix) != dim:
        raise utils.ArityError(f"tensorExt data must have {dim} entries on every axis.")
    rows = matrix.tolist() if isinstance(matrix, sympy.MatrixBase) else matrix
    for row in rows:
        _check_shape(row, depth - 1, dim)


_ext_counter = itertools.count(1)


def tensor_ext(
    session: "Session",
    matrix: typing.Any,
    valence: typing.Sequence[int],
    name: str | None = None,
    symmetries: typing.Iterable[Symmetry] = (),
    **kwargs: typing.Any,
) -> TensorField:
    """Wraps dense component data as a tensor readable at any valence.

    ``valence`` holds one +1 (covariant) or -1 (contravariant) per slot and says
    how the data is laid out.
    """
    if isinstance(matrix, sympy.MatrixBase):
        matrix = matrix.tolist()
    rank = len(valence)
    _check_shape(matrix, rank, session.manifold.dim)

    def base_fn(idx: IndexTuple) -> sx.Expr:
        value = matrix
        for e in idx:
            value = value[abs(e) - 1]
        return sympy.sympify(value)

    return define_tensor(
        session,
        name or f"tensorExt{next(_ext_counter)}",
        base_fn,
        rank,
        symmetries,
        base_valence=valence,
        **kwargs,
    )


def cacheview(tensor: TensorField) -> list[IndexTuple]:
    return tensor.cache_view()


def associated(session: "Session", tensor: TensorField) -> list[tuple[str, IndexTuple]]:
    entries = [(tensor.name, key) for key in tensor.cache]
    for derived in session.registry.descendants(tensor):
        entries.extend((derived.name, key) for key in derived.cache)
    return entries


def retreat(
    session: "Session",
    tensor: TensorField,
    scope: typing.Literal["self", "associated"] = "self",
) -> None:
    tensor.retreat()
    if scope == "associated":
        for derived in session.registry.descendants(tensor):
            derived.retreat()


def evaluated_count(tensor: TensorField) -> int:
    return tensor.evaluated_count


_SLOT = re.compile(r"([_^])([A-Za-z])")


def _parse_slots(spec: str) -> list[tuple[str, str]]:
    spec = spec.replace(" ", "")
    slots = _SLOT.findall(spec)
    if "".join(m + letter for m, letter in slots) != spec:
        raise utils.ArityError(f"Could not read index pattern {spec!r}.")
    return slots


def contract(
    subscripts: str, *operands: TensorField, **fixed: int
) -> sx.Expr:
    """Sums a product of tensor components over repeated index letters.

    ``"_a_b,^a^b"`` means sum over a and b of T1(a, b) * T2(-a, -b). Letters given
    as keywords are held at that slot number instead of summed. Letters are
    looped in order of first appearance and each factor is evaluated as soon as
    its letters are bound, so a vanishing factor prunes the rest of the loop.
    """
    specs = subscripts.split(",")
    if len(specs) != len(operands):
        raise utils.ArityError(
            f"Pattern {subscripts!r} names {len(specs)} operands, got {len(operands)}."
        )

    slots_per_operand = [_parse_slots(spec) for spec in specs]
    order: list[str] = []
    counts: dict[str, int] = {}
    for tensor, slots in zip(operands, slots_per_operand, strict=True):
        if len(slots) != tensor.rank:
            raise utils.ArityError(
                f"{tensor.name} takes {tensor.rank} indices, pattern gives {len(slots)}."
            )
        for _, letter in slots:
            counts[letter] = counts.get(letter, 0) + 1
            if letter not in fixed and letter not in order:
                order.append(letter)

    for letter in order:
        if counts[letter] < 2:
            raise utils.ArityError(f"Index {letter!r} is free; pass a value for it.")

    ready = [
        max((order.index(letter) + 1 for _, letter in slots if letter not in fixed), default=0)
        for slots in slots_per_operand
    ]
    dim = operands[0].session.manifold.dim if operands else 0
    terms: list[sx.Expr] = []
    values: dict[str, int] = dict(fixed)

    def walk(depth: int, product: sx.Expr) -> None:
        for tensor, slots, at in zip(operands, slots_per_operand, ready, strict=True):
            if at != depth:
                continue
            idx = tuple(values[letter] if m == "_" else -values[letter] for m, letter in slots)
            product *= tensor.component(idx)
            if product == 0:
                return

        if depth == len(order):
            terms.append(product)
            return

        letter = order[depth]
        for value in range(1, dim + 1):
            values[letter] = value
            walk(depth + 1, product)

    walk(0, sympy.Integer(1))
    return sympy.Add(*terms)
