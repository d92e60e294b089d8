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
import typing

import numpy as np
import pytest
import sympy

import common.curvature as curvature
import common.deriv as deriv
import common.tensor as tn
import common.utils as utils
from common.session import Session


def _counting(session: Session, name: str, symmetries: list[tn.Symmetry]) -> tn.TensorField:
    def base_fn(idx: tn.IndexTuple) -> sympy.Expr:
        return sympy.Integer(10 * idx[0] + idx[1])

    return session.define_tensor(name, base_fn, 2, symmetries)


def test_symmetric_pairs_share_one_evaluation(polar: Session) -> None:
    t = _counting(polar, "s", [tn.symmetric(1, 2, 2)])
    assert t(1, 2) == 12
    assert t(2, 1) == 12
    assert t.eval_count == 1
    assert t.hits == 1
    assert t.cache_view() == [(1, 2)]


def test_antisymmetric_diagonal_vanishes_without_evaluation(polar: Session) -> None:
    t = _counting(polar, "a", [tn.antisymmetric(1, 2, 2)])
    assert t(2, 2) == 0
    assert t.eval_count == 0
    assert t(2, 1) == -12
    assert t.eval_count == 1


def test_canonicalize_riemann_orbit(polar: Session) -> None:
    riemann = polar.riemann
    assert riemann.canonicalize((2, 1, 1, 2)) == ((1, 2, 1, 2), -1)
    assert riemann.canonicalize((2, 1, 2, 1)) == ((1, 2, 1, 2), 1)
    assert riemann.canonicalize((1, 1, 1, 2))[1] == 0
    # swapping the pairs would move an upper index into a lower slot
    assert riemann.canonicalize((-2, 1, 1, 2)) == ((-2, 1, 1, 2), 1)


def test_bad_symmetry(polar: Session) -> None:
    with pytest.raises(utils.ArityError):
        _counting(polar, "bad", [((1, 1), 1)])
    with pytest.raises(utils.ArityError):
        _counting(polar, "bad", [((2, 1), 2)])


def test_arity_and_range(schwarzschild: Session) -> None:
    with pytest.raises(utils.ArityError):
        schwarzschild.riemann(1, 2, 1)
    with pytest.raises(utils.IndexRangeError):
        schwarzschild.riemann(1, 2, 1, 5)
    with pytest.raises(utils.IndexRangeError):
        schwarzschild.ricci(0, 1)


def test_christoffel_has_one_valence(schwarzschild: Session) -> None:
    with pytest.raises(utils.IndexRangeError):
        schwarzschild.christoffel(1, 2, 2)


def test_riemann_counts(schwarzschild: Session) -> None:
    curvature.ricci_scalar(schwarzschild)
    assert schwarzschild.riemann.evaluated_count == 16

    for i in range(1, 5):
        for j in range(1, 5):
            schwarzschild.ricci(i, j)
    assert schwarzschild.riemann.evaluated_count == 40


def test_no_recomputation(schwarzschild: Session) -> None:
    first = curvature.ricci_scalar(schwarzschild)
    counts = {s.name: s.evaluations for s in schwarzschild.cache_stats()}

    assert curvature.ricci_scalar(schwarzschild) == first
    schwarzschild.riemann(2, 1, 2, 1)
    schwarzschild.riemann(1, 2, 1, 2)
    assert {s.name: s.evaluations for s in schwarzschild.cache_stats()} == counts


def _random_index(rng: np.random.Generator, rank: int, dim: int) -> tuple[int, ...]:
    return tuple(
        int(rng.integers(1, dim + 1)) * (1 if rng.random() < 0.7 else -1)
        for _ in range(rank)
    )


def test_repeated_requests_never_recompute(schwarzschild: Session) -> None:
    riemann = schwarzschild.riemann
    rng = np.random.default_rng(1998)
    requests = [_random_index(rng, 4, 4) for _ in range(100)]

    first = [riemann(*idx) for idx in requests]
    evaluations = {s.name: s.evaluations for s in schwarzschild.cache_stats()}
    assert riemann.eval_count > 0

    assert [riemann(*idx) for idx in requests] == first
    assert {s.name: s.evaluations for s in schwarzschild.cache_stats()} == evaluations

    # retreat resets the count; the recomputed component is the same expression
    target = next(k for k, value in enumerate(first) if value != 0)
    schwarzschild.retreat(riemann)
    assert riemann.eval_count == 0
    assert riemann(*requests[target]) == first[target]
    assert riemann.eval_count > 0


def test_symmetry_soundness(shared_schwarzschild: Session) -> None:
    riemann = shared_schwarzschild.riemann
    rng = np.random.default_rng(5)

    for _ in range(50):
        idx = tuple(
            int(rng.integers(1, 5)) * (1 if rng.random() < 0.7 else -1) for _ in range(4)
        )
        key, sign = riemann.canonicalize(idx)
        value = riemann(*idx)
        if sign == 0:
            assert value == 0
        else:
            assert shared_schwarzschild.equivalent(value, sign * riemann(*key))


def test_tensor_ext_changes_valence(schwarzschild: Session) -> None:
    v = schwarzschild.vector_field(["1", "0", "0", "0"])
    assert schwarzschild.equivalent(v(-1), schwarzschild.parse("-r/(r - 2*M)"))
    assert v(-2) == 0

    raised = schwarzschild.vector_field([v(-1), 0, 0, 0], valence=-1, name="raised")
    assert schwarzschild.simplify(raised(1)) == 1


# off-diagonal metric entries, each of magnitude at most 1
OFF_DIAGONAL = ("1", "-1", "1/2", "x/(4 + x^2)", "Sin[y]/2")
TENSOR_ENTRIES = ("0", "1", "2", "x", "y^2", "x*y", "Cos[x]", "y - 3")


def _pick(rng: np.random.Generator, options: tuple[str, ...]) -> str:
    return options[int(rng.integers(len(options)))]


def _random_metric(rng: np.random.Generator, coords: tuple[str, ...]) -> list[list[str]]:
    # diagonally dominant, so positive definite everywhere
    dim = len(coords)
    metric = [[f"3 + {c}^2" if i == j else "0" for j in range(dim)] for i, c in enumerate(coords)]
    for i in range(dim):
        for j in range(i + 1, dim):
            if (i, j) == (0, 1) or rng.random() < 0.5:
                metric[i][j] = metric[j][i] = _pick(rng, OFF_DIAGONAL)
    return metric


@pytest.mark.parametrize("seed", range(6))
def test_valence_round_trip(
    custom_session: typing.Callable[..., Session], seed: int
) -> None:
    rng = np.random.default_rng(seed)
    coords = ("x", "y", "z")[: 2 + seed % 2]
    dim = len(coords)
    session = custom_session(coords, metric=_random_metric(rng, coords))
    slots = range(1, dim + 1)

    t = session.tensor_ext(
        [[session.parse(_pick(rng, TENSOR_ENTRIES)) for _ in slots] for _ in slots],
        (1, 1),
        name="t",
    )
    for i, j in itertools.product(slots, repeat=2):
        raised = sympy.Add(
            *[
                session.metric(-i, -a) * session.metric(-j, -b) * t(a, b)
                for a, b in itertools.product(slots, repeat=2)
            ]
        )
        assert session.equivalent(t(-i, -j), raised)

    upper = session.tensor_ext(
        [[t(-i, -j) for j in slots] for i in slots], (-1, -1), name="upper"
    )
    for i, j in itertools.product(slots, repeat=2):
        assert session.equivalent(upper(i, j), t(i, j))
        assert session.equivalent(upper(-i, j), t(-i, j))


def test_tensor_ext_shape(polar: Session) -> None:
    with pytest.raises(utils.ArityError):
        polar.tensor_ext([1, 2, 3], (1,))
    with pytest.raises(utils.ArityError):
        polar.tensor_ext([[1, 2], [3]], (1, 1))
    with pytest.raises(utils.ArityError):
        polar.tensor_ext([[[1]] * 2] * 2, (1, 1))


def test_scalar_field(polar: Session) -> None:
    f = polar.scalar_field("r^2", name="f")
    assert f.rank == 0
    assert f() == polar.parse("r^2")
    assert polar.tensor("f") is f


def test_duplicate_definition_warns(polar: Session) -> None:
    polar.scalar_field("1", name="dup")
    with pytest.warns(utils.DuplicateTensorWarning):
        replacement = polar.scalar_field("2", name="dup")
    assert polar.tensor("dup") is replacement


def test_unknown_tensor_suggestions(schwarzschild: Session) -> None:
    with pytest.raises(utils.UnknownTensorError) as excinfo:
        schwarzschild.tensor("Rieman")
    assert "riemann" in excinfo.value.suggestions


def test_tensor_lookup_is_case_insensitive(schwarzschild: Session) -> None:
    assert schwarzschild.tensor("RicciScalar") is schwarzschild.ricciScalar


def test_cacheview_and_retreat(schwarzschild: Session) -> None:
    riemann = schwarzschild.riemann
    assert tn.cacheview(riemann) == []

    riemann(1, 2, 1, 2)
    assert (1, 2, 1, 2) in tn.cacheview(riemann)
    assert tn.evaluated_count(riemann) >= 1

    schwarzschild.retreat(riemann)
    assert tn.cacheview(riemann) == []
    assert riemann.eval_count == 0


def test_associated_and_retreat_scope(schwarzschild: Session) -> None:
    riemann = schwarzschild.riemann
    nabla = deriv.covariant_d(schwarzschild, riemann)
    nabla(1, 2, 1, 2, 2)

    names = {name for name, _ in schwarzschild.associated(riemann)}
    assert names == {"riemann", "covariantD[riemann]"}

    schwarzschild.retreat(riemann)
    assert nabla.evaluated_count > 0

    schwarzschild.retreat(riemann, "associated")
    assert nabla.evaluated_count == 0


def test_reopen_clears_caches(schwarzschild: Session) -> None:
    riemann = schwarzschild.riemann
    riemann(1, 2, 1, 2)
    curvature.kretschmann(schwarzschild)
    for tensor in schwarzschild.registry:
        if tensor.rank == 0:
            tensor()

    schwarzschild.open_line_element(["x", "y"], "Dt[x]^2 + Dt[y]^2")
    assert schwarzschild.riemann is riemann
    for tensor in schwarzschild.registry:
        assert tn.cacheview(tensor) == [], tensor.name
    assert riemann(1, 2, 1, 2) == 0
    assert schwarzschild.leviCivita.rank == 2


def test_reopen_drops_tensors_of_the_old_manifold(schwarzschild: Session) -> None:
    v = schwarzschild.vector_field(["1", "r", "0", "0"], name="V")
    nabla_v = deriv.covariant_d(schwarzschild, v)
    nabla_riemann = deriv.covariant_d(schwarzschild, schwarzschild.riemann)
    nabla_v(1, 1)

    schwarzschild.open_line_element(["x", "y"], "Dt[x]^2 + Dt[y]^2")
    names = schwarzschild.registry.names()
    assert "V" not in names
    assert "covariantD[V]" not in names
    assert "covariantD[riemann]" not in names
    assert "riemann" in names

    with pytest.raises(utils.UnknownTensorError):
        v(2)
    with pytest.raises(utils.UnknownTensorError):
        nabla_v(1, 1)
    with pytest.raises(utils.UnknownTensorError):
        schwarzschild.tensor("V")

    # derivatives of the predefined fields come back on demand
    again = deriv.covariant_d(schwarzschild, schwarzschild.riemann)
    assert again is not nabla_riemann
    assert again(1, 2, 1, 2, 1) == 0


def test_replaced_tensor_stops_answering(polar: Session) -> None:
    old = polar.scalar_field("1", name="g1")
    with pytest.warns(utils.DuplicateTensorWarning):
        polar.scalar_field("2", name="g1")
    with pytest.raises(utils.UnknownTensorError):
        old()


def test_contract(schwarzschild: Session) -> None:
    g = schwarzschild.metric
    v = schwarzschild.vector_field(["1", "0", "0", "1"], name="v")
    metric = schwarzschild.predefined["metric"]

    norm = tn.contract("_i,^i", v, v)
    assert schwarzschild.equivalent(norm, g(-1, -1) + g(-4, -4))
    assert schwarzschild.simplify(tn.contract("_i_j,^j", metric, v, i=1)) == v(1)
    assert tn.contract("_i^i", metric) == 4


@pytest.mark.parametrize(
    ("pattern", "count"), [("_i,^j", 2), ("_i^i", 2), ("_i_j", 1), ("_i,$i", 2)]
)
def test_contract_errors(schwarzschild: Session, pattern: str, count: int) -> None:
    v = schwarzschild.vector_field(["1", "0", "0", "0"], name="v")
    with pytest.raises(utils.ArityError):
        tn.contract(pattern, *([v] * count))
