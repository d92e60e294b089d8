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

import argparse
import collections
import logging
import os
import sys
import traceback
import typing
from pathlib import Path

import orjson
import sentry_sdk

if typing.TYPE_CHECKING:
    from common.session import Session

SENTRY_ENABLED = bool(os.environ.get("SENTRY_DSN", False))  # type: ignore

logger = logging.getLogger("grg")

_DEBUG: dict[str, bool] = orjson.loads(os.environ.get("DEBUG", "{}"))
_debug_defaults = {
    "PRINT_TRACEBACK_FOR_ERRORS": False,
    "CHECK_METRIC_INVERSE": True,
    "LOG_EVALUATIONS": False,
}

EQUIVALENCE_SAMPLES = int(os.environ.get("EQUIVALENCE_SAMPLES", "20"))
EQUIVALENCE_SEED = int(os.environ.get("EQUIVALENCE_SEED", "20150115"))


def FEATURE(feature: str) -> bool:  # noqa: N802
    return _DEBUG.get(feature, _debug_defaults[feature])


class GRGError(Exception):
    # base for every failure that is the user's input rather than our bug
    exit_code: typing.ClassVar[int] = 1


class ExprSyntaxError(GRGError):
    def __init__(self, message: str, text: str, position: int) -> None:
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class UnknownFunctionError(GRGError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Unknown function {name!r}.")


class EvaluationError(GRGError):
    pass


class UnboundSymbolError(EvaluationError):
    pass


class SingularPointError(EvaluationError):
    pass


class DomainError(EvaluationError):
    pass


class InconclusiveComparison(GRGError):
    pass


class ManifoldError(GRGError):
    pass


class SingularMetricError(ManifoldError):
    def __init__(self) -> None:
        super().__init__("singular metric")


class IndexRangeError(GRGError):
    exit_code = 2


class ArityError(GRGError):
    exit_code = 2


class UnknownTensorError(GRGError):
    exit_code = 3

    def __init__(self, name: str, suggestions: typing.Sequence[str] = ()) -> None:
        self.name = name
        self.suggestions = tuple(suggestions)
        message = f"Unknown tensor {name!r}."
        if self.suggestions:
            message += f" Did you mean: {', '.join(self.suggestions)}?"
        super().__init__(message)


class SpecError(GRGError):
    exit_code = 4


class DimensionError(GRGError):
    exit_code = 5

    def __init__(self, what: str, requirement: str) -> None:
        super().__init__(f"{what} requires {requirement}")


class NullVectorError(GRGError):
    def __init__(self, name: str) -> None:
        super().__init__(f"null vector: {name} has vanishing norm")


class DuplicateTensorWarning(UserWarning):
    pass


def error_handle(error: Exception) -> None:
    if FEATURE("PRINT_TRACEBACK_FOR_ERRORS") or not SENTRY_ENABLED:
        traceback.print_exception(error)
        logger.error("An error occured.", exc_info=error)
    else:
        scope = sentry_sdk.Scope.get_current_scope()
        scope.set_context("argv", {"argv": sys.argv})
        sentry_sdk.capture_exception(error)


def parse_indices(text: str) -> tuple[int, ...]:
    # "1,-2, 3" -> (1, -2, 3); "" is the rank-0 request
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise IndexRangeError(f"Could not read indices from {text!r}.") from None


def file_to_ext(str_path: str, base_path: str) -> str:
    # changes a file to an import-like string
    str_path = str_path.replace(base_path, "")
    str_path = str_path.replace("/", ".")
    return str_path.replace(".py", "")


def get_all_extensions(str_path: str, folder: str = "exts") -> collections.deque[str]:
    # gets all extensions in a folder
    ext_files: collections.deque[str] = collections.deque()
    base_path = str_path.split(folder)[0].replace("\\", "/")

    if base_path[-1] != "/":
        base_path += "/"

    pathlist = sorted(Path(f"{base_path}/{folder}").glob("**/*.py"))
    for path in pathlist:
        str_path = str(path.as_posix())
        ext_files.append(file_to_ext(str_path, base_path))

    return ext_files


class CommandContext:
    """Everything a command callback needs: parsed options, the session and stdout."""

    __slots__ = ("args", "cli", "err", "out", "session")

    def __init__(
        self,
        cli: "GRGBase",
        args: argparse.Namespace,
        session: "Session",
        out: typing.TextIO | None = None,
        err: typing.TextIO | None = None,
    ) -> None:
        self.cli = cli
        self.args = args
        self.session = session
        self.out = out or sys.stdout
        self.err = err or sys.stderr

    @property
    def json(self) -> bool:
        return getattr(self.args, "format", "text") == "json"

    def send(self, content: str | bytes) -> None:
        if isinstance(content, bytes):
            content = content.decode()
        self.out.write(f"{content}\n")

    def warn(self, content: str) -> None:
        self.err.write(f"{content}\n")


class _CommandMeta(typing.NamedTuple):
    name: str
    help: str
    options: list[tuple[tuple[str, ...], dict[str, typing.Any]]]


def command(
    name: str, *, help: str  # noqa: A002
) -> typing.Callable[[typing.Callable], typing.Callable]:
    def wrapper(func: typing.Callable) -> typing.Callable:
        options = getattr(func, "__grg_options__", [])
        # decorators apply bottom-up, so the stored list is reversed
        func.__grg_command__ = _CommandMeta(name, help, list(reversed(options)))
        return func

    return wrapper


def option(
    *flags: str, **kwargs: typing.Any
) -> typing.Callable[[typing.Callable], typing.Callable]:
    def wrapper(func: typing.Callable) -> typing.Callable:
        if not hasattr(func, "__grg_options__"):
            func.__grg_options__ = []
        func.__grg_options__.append((flags, kwargs))
        return func

    return wrapper


class GRGBase:
    parser: argparse.ArgumentParser
    subparsers: "argparse._SubParsersAction[argparse.ArgumentParser]"
    common_options: argparse.ArgumentParser
    commands: dict[str, typing.Callable[[CommandContext], int | None]]
    error_handlers: list[typing.Callable[[CommandContext, Exception], int | None]]


class Extension:
    """Collects every method decorated with `command` and registers it on the CLI."""

    def __init__(self, cli: GRGBase) -> None:
        self.cli = cli

        for attr_name in dir(type(self)):
            func = getattr(type(self), attr_name)
            meta: _CommandMeta | None = getattr(func, "__grg_command__", None)
            if meta is None:
                continue

            sub = cli.subparsers.add_parser(
                meta.name, help=meta.help, parents=[cli.common_options]
            )
            for flags, kwargs in meta.options:
                sub.add_argument(*flags, **kwargs)
            cli.commands[meta.name] = getattr(self, attr_name)
