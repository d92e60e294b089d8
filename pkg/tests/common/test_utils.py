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

from pathlib import Path

import pytest

import common.utils as utils

ROOT = Path(__file__).parents[2].as_posix()


@pytest.mark.parametrize("location", [ROOT, f"{ROOT}/", f"{ROOT}/exts"])
def test_get_all_extensions(location: str) -> None:
    exts = list(utils.get_all_extensions(location))
    assert "exts.component" in exts
    assert "exts.laplacian" in exts
    assert all(ext.startswith("exts.") for ext in exts)
    assert exts == sorted(exts)


@pytest.mark.parametrize(
    ("text", "expected"), [("", ()), ("1,-2", (1, -2)), (" 3, 4 ", (3, 4))]
)
def test_parse_indices(text: str, expected: tuple[int, ...]) -> None:
    assert utils.parse_indices(text) == expected


def test_parse_indices_rejects_words() -> None:
    with pytest.raises(utils.IndexRangeError):
        utils.parse_indices("1,x")
