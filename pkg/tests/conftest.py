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

import os
import typing

# keep test runs out of the real log file
os.environ.setdefault("LOG_FILE_PATH", os.devnull)

import pytest

import common.models as models
from common.session import Session


def open_bundled(name: str) -> Session:
    session = Session()
    models.open_spec(session, models.load_spec(name))
    return session


@pytest.fixture(scope="session")
def open_session() -> typing.Callable[[str], Session]:
    return open_bundled


@pytest.fixture
def schwarzschild() -> Session:
    return open_bundled("schwarzschild")


@pytest.fixture(scope="module")
def shared_schwarzschild() -> Session:
    # one cache for a whole module; only for tests that do not count evaluations
    return open_bundled("schwarzschild")


@pytest.fixture
def catenoid() -> Session:
    return open_bundled("catenoid")


@pytest.fixture
def polar() -> Session:
    return open_bundled("polar")


@pytest.fixture
def sphere2() -> Session:
    return open_bundled("sphere2")


@pytest.fixture
def minkowski() -> Session:
    return open_bundled("minkowski")


@pytest.fixture
def cartesian2() -> Session:
    return open_bundled("cartesian2")


def open_custom(
    coordinates: typing.Sequence[str],
    *,
    metric: typing.Sequence[typing.Sequence[str]] | None = None,
    line_element: str | None = None,
    assumptions: typing.Sequence[str] = (),
) -> Session:
    spec = models.ManifoldSpec(
        list(coordinates),
        [list(row) for row in metric] if metric is not None else None,
        line_element,
        list(assumptions),
    )
    spec.validate()

    session = Session()
    models.open_spec(session, spec)
    return session


@pytest.fixture(scope="session")
def custom_session() -> typing.Callable[..., Session]:
    return open_custom
