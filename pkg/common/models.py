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
from pathlib import Path

import msgspec
import sympy

import common.symexpr as sx
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session

__all__ = (
    "SPECS_DIRECTORY",
    "CacheEntry",
    "CacheReport",
    "ComponentReport",
    "InvariantReport",
    "LaplacianReport",
    "ManifoldSpec",
    "RunReport",
    "load_spec",
    "msgspec_dumps",
    "open_spec",
)

SPECS_DIRECTORY = Path(__file__).parent.parent / "specs"


class ManifoldSpec(msgspec.Struct, forbid_unknown_fields=True):
    coordinates: list[str]
    metric: list[list[str]] | None = None
    line_element: str | None = None
    assumptions: list[str] = msgspec.field(default_factory=list)

    def validate(self) -> None:
        if not self.coordinates:
            raise utils.SpecError("A spec needs at least one coordinate.")
        if (self.metric is None) == (self.line_element is None):
            raise utils.SpecError("A spec needs exactly one of metric and line_element.")

        if self.metric is not None:
            dim = len(self.coordinates)
            if len(self.metric) != dim or any(len(row) != dim for row in self.metric):
                raise utils.SpecError(
                    f"The metric must be {dim}x{dim} to match the coordinates."
                )


def _resolve(path: str | Path) -> Path:
    candidate = Path(path)
    if candidate.is_file():
        return candidate

    # bundled specs can be named without their directory or extension
    for name in (candidate.name, f"{candidate.name}.spec"):
        bundled = SPECS_DIRECTORY / name
        if bundled.is_file():
            return bundled

    raise utils.SpecError(f"No spec file at {str(path)!r}.")


def load_spec(path: str | Path) -> ManifoldSpec:
    location = _resolve(path)
    try:
        spec = msgspec.json.decode(location.read_bytes(), type=ManifoldSpec)
    except msgspec.DecodeError as e:
        # ValidationError subclasses DecodeError
        raise utils.SpecError(f"{location.name}: {e}") from None

    spec.validate()
    return spec


def open_spec(session: "Session", spec: ManifoldSpec) -> None:
    try:
        assumptions = sx.AssumptionSet.from_strings(spec.assumptions)
        if spec.line_element is not None:
            session.open_line_element(spec.coordinates, spec.line_element, assumptions)
            return

        symbols = [assumptions.symbol(c) for c in spec.coordinates]
        matrix = [[sx.parse(entry, assumptions) for entry in row] for row in spec.metric]  # type: ignore
        session.open(symbols, matrix, assumptions)
    except (
        utils.ExprSyntaxError,
        utils.UnknownFunctionError,
        utils.ManifoldError,
    ) as e:
        raise utils.SpecError(f"Could not open the manifold: {e}") from e


class ComponentReport(msgspec.Struct):
    tensor: str
    indices: list[int]
    expression: str
    evaluated_counts: dict[str, int]


class InvariantReport(msgspec.Struct):
    invariant: str
    expression: str
    real: str
    imaginary: str
    evaluated_counts: dict[str, int]


class LaplacianReport(msgspec.Struct):
    function: str
    expression: str


class CacheEntry(msgspec.Struct, array_like=True):
    tensor: str
    indices: list[int]


class CacheReport(msgspec.Struct):
    tensor: str
    action: str
    entries: list[CacheEntry] = msgspec.field(default_factory=list)
    stats: list[dict[str, typing.Any]] = msgspec.field(default_factory=list)


class RunReport(msgspec.Struct):
    results: list[typing.Any]
    evaluated_counts: dict[str, int]


def msgspec_enc_hook(obj: typing.Any) -> typing.Any:
    if isinstance(obj, sympy.Basic):
        return sx.to_text(obj)
    if isinstance(obj, tuple):
        return list(obj)

    raise NotImplementedError(f"Objects of type {type(obj)} are not supported")


msgspec_encoder = msgspec.json.Encoder(enc_hook=msgspec_enc_hook)


def msgspec_dumps(obj: typing.Any) -> str:
    return msgspec_encoder.encode(obj).decode()
