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

from rapidfuzz import process
from rapidfuzz.distance import JaroWinkler


def _strip_brackets(name: str) -> str:
    return name.lower().replace("[", " ").replace("]", " ")


_PROCESSORS: tuple[typing.Callable[[str], str], ...] = (str.lower, _strip_brackets)


def suggest_names(
    argument: str,
    names: typing.Collection[str],
    *,
    limit: int = 3,
    score_cutoff: float = 0.75,
) -> list[str]:
    """Uses multiple processors so both plain and derived tensor names match well."""
    scored: dict[str, float] = {}

    for processor in _PROCESSORS:
        for name, score, _ in process.extract(
            argument,
            names,
            scorer=JaroWinkler.similarity,
            processor=processor,
            score_cutoff=score_cutoff,
            limit=None,
        ):
            scored[name] = max(score, scored.get(name, 0.0))

    return sorted(scored, key=lambda n: scored[n], reverse=True)[:limit]
