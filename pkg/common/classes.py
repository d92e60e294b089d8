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
from collections.abc import Collection


class HasName(typing.Protocol):
    @property
    def name(self) -> str: ...


class NamedSet[T: HasName](Collection[T]):
    """Items kept in insertion order and found by name, exactly or case-folded.

    At most one item per exact name; adding a second returns the one it displaced.
    """

    def __init__(self, an_iter: typing.Iterable[T] | None = None, /) -> None:
        self._dict: dict[str, T] = {}
        self._folded: dict[str, list[str]] = {}

        for element in an_iter or ():
            self.add(element)

    def __repr__(self) -> str:
        if not self:
            return f"{self.__class__.__name__}()"
        return f"{self.__class__.__name__}({list(self._dict)!r})"

    def __contains__(self, element: object) -> bool:
        name = getattr(element, "name", None)
        return isinstance(name, str) and self._dict.get(name) is element

    def __len__(self) -> int:
        return len(self._dict)

    def __iter__(self) -> typing.Iterator[T]:
        return iter(list(self._dict.values()))

    def names(self) -> list[str]:
        return list(self._dict)

    def get(self, name: str, *, fold: bool = True) -> T | None:
        if (found := self._dict.get(name)) is not None or not fold:
            return found
        names = self._folded.get(name.casefold())
        return self._dict[names[0]] if names else None

    def add(self, element: T) -> T | None:
        displaced = self._dict.pop(element.name, None)
        if displaced is None:
            self._folded.setdefault(element.name.casefold(), []).append(element.name)
        self._dict[element.name] = element
        return displaced

    def discard(self, element: T) -> None:
        if element not in self:
            return
        del self._dict[element.name]
        folded = self._folded[element.name.casefold()]
        folded.remove(element.name)
        if not folded:
            del self._folded[element.name.casefold()]

    def clear(self) -> None:
        self._dict.clear()
        self._folded.clear()
