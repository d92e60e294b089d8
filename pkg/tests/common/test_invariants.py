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

import logging
import typing

import curvature_models
import pytest
import sympy

import common.invariants as invariants
import common.symexpr as sx
import common.tensor as tn
import common.utils as utils
from common.session import Session

SCHWARZSCHILD_INVARIANTS = {
    "R1": "0",
    "R2": "0",
    "R3": "0",
    "W1": "6*M^2/r^6",
    "W2": "-6*M^3/r^9",
    "M1": "0",
    "M2": "0",
    "M3": "0",
    "M4": "0",
    "M5": "0",
}


@pytest.fixture(scope="module")
def schwarzschild_invariants(shared_schwarzschild: Session) -> dict[str, sx.Expr]:
    return invariants.cm_all(shared_schwarzschild)


@pytest.mark.parametrize(("which", "expected"), SCHWARZSCHILD_INVARIANTS.items())
def test_schwarzschild(
    shared_schwarzschild: Session,
    schwarzschild_invariants: dict[str, sx.Expr],
    which: str,
    expected: str,
) -> None:
    value = schwarzschild_invariants[which]
    assert value == shared_schwarzschild.parse(expected)


def test_w1_is_real(shared_schwarzschild: Session) -> None:
    _, imag = sx.split_complex(
        invariants.cm_invariant(shared_schwarzschild, "W1"), shared_schwarzschild.assumptions
    )
    assert imag == 0


def test_invariants_are_cached(shared_schwarzschild: Session) -> None:
    field = invariants.cm_field(shared_schwarzschild, "W1")
    assert invariants.cm_field(shared_schwarzschild, "W1") is field
    assert shared_schwarzschild.tensor("CMinvW1") is field

    before = field.eval_count
    invariants.cm_invariant(shared_schwarzschild, "w1")
    assert field.eval_count == before


def test_minkowski_vanishes(minkowski: Session) -> None:
    assert set(invariants.cm_all(minkowski).values()) == {0}


def test_dimension(catenoid: Session) -> None:
    with pytest.raises(utils.DimensionError):
        invariants.cm_invariant(catenoid, "W1")


def test_unknown_invariant(shared_schwarzschild: Session) -> None:
    with pytest.raises(utils.UnknownTensorError) as excinfo:
        invariants.cm_invariant(shared_schwarzschild, "W3")
    assert excinfo.value.suggestions == ("W1", "W2")


def test_joint_evaluation_shares_riemann(
    open_session: typing.Callable[[str], Session], caplog: pytest.LogCaptureFixture
) -> None:
    counts = {}
    for label, which in (("W1", ["W1"]), ("W2", ["W2"]), ("joint", ["W1", "W2"])):
        session = open_session("schwarzschild")
        for name in which:
            invariants.cm_invariant(session, name)
        counts[label] = session.riemann.evaluated_count

    with caplog.at_level(logging.INFO):
        logging.getLogger("grg").info("riemann components per run: %s", counts)
    assert counts["joint"] < counts["W1"] + counts["W2"]


def test_r1_contraction_orders_agree(custom_session: typing.Callable[..., Session]) -> None:
    session = custom_session(
        curvature_models.REISSNER_NORDSTROM_COORDINATES,
        metric=curvature_models.REISSNER_NORDSTROM_METRIC,
        assumptions=curvature_models.REISSNER_NORDSTROM_ASSUMPTIONS,
    )
    plebanski = session.plebanski
    r1 = invariants.cm_invariant(session, "R1")
    swapped = tn.contract("^b_a,^a_b", plebanski, plebanski) / 4
    assert session.equivalent(r1, swapped)
    assert session.equivalent(r1, session.parse("Q^4/r^8"))


def test_r1_is_coordinate_invariant(custom_session: typing.Callable[..., Session]) -> None:
    session = custom_session(
        curvature_models.REISSNER_NORDSTROM_COORDINATES,
        metric=curvature_models.REISSNER_NORDSTROM_METRIC,
        assumptions=curvature_models.REISSNER_NORDSTROM_ASSUMPTIONS,
    )
    # the same spacetime with the radius shifted by one unit, r = s + 1
    shifted = custom_session(
        ("t", "s", "theta", "phi"),
        metric=[
            [entry.replace("r", "(s + 1)") for entry in row]
            for row in curvature_models.REISSNER_NORDSTROM_METRIC
        ],
        assumptions=("0 < s", "0 < theta < Pi", "0 < M", "0 < Q"),
    )

    r1 = invariants.cm_invariant(session, "R1")
    r1_shifted = invariants.cm_invariant(shifted, "R1")
    point = {"r": 3.5, "s": 2.5, "M": 0.7, "Q": 0.4, "theta": 1.1}
    assert complex(sx.eval_numeric(r1, point)) == pytest.approx(
        complex(sx.eval_numeric(r1_shifted, point))
    )
    assert sympy.sympify(r1).free_symbols


def test_cm_terms_cover_every_name() -> None:
    assert invariants.CM_NAMES == ("R1", "R2", "R3", "W1", "W2", "M1", "M2", "M3", "M4", "M5")
    for terms in invariants.CM_TERMS.values():
        for term in terms:
            assert len(term.pattern.split(",")) == len(term.factors)


@pytest.mark.parametrize("name", ["W1", "W2"])
def test_weyl_dual_terms_share_placement(name: str) -> None:
    real, dual = invariants.CM_TERMS[name]
    assert real.pattern == dual.pattern
    assert dual.factors == "D" + real.factors[1:]
    assert dual.coefficient == sympy.I * real.coefficient
