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
import importlib
import logging
import os
import sys
import typing

import grg_config

grg_config.load()

logger = logging.getLogger("grg")
logger.setLevel(logging.INFO)
handler = logging.FileHandler(
    filename=os.environ["LOG_FILE_PATH"], encoding="utf-8", mode="a"
)
handler.setFormatter(
    logging.Formatter("%(asctime)s:%(levelname)s:%(name)s: %(message)s")
)
logger.addHandler(handler)

import sentry_sdk

import common.models as models
import common.utils as utils
from common.session import Session


def default_sentry_filter(
    event: dict[str, typing.Any], hint: dict[str, typing.Any]
) -> typing.Optional[dict[str, typing.Any]]:
    if "exc_info" in hint:
        _, exc_value, _ = hint["exc_info"]
        if isinstance(exc_value, KeyboardInterrupt):
            #  We don't need to report a ctrl+c
            return None
        if isinstance(exc_value, utils.GRGError):
            # bad input, not a bug
            return None
    return event


if not utils.FEATURE("PRINT_TRACEBACK_FOR_ERRORS") and utils.SENTRY_ENABLED:
    sentry_sdk.init(dsn=os.environ["SENTRY_DSN"], before_send=default_sentry_filter)


# commands that may run without --spec
SPECLESS_COMMANDS = frozenset({"run"})


class GRGCli(utils.GRGBase):
    def __init__(self) -> None:
        self.common_options = argparse.ArgumentParser(add_help=False)
        self.common_options.add_argument(
            "--spec", help="Manifold spec file, or the name of a bundled spec."
        )
        self.common_options.add_argument(
            "--format", choices=("text", "json"), default="text"
        )
        self.common_options.add_argument(
            "--seed",
            type=int,
            default=None,
            help="Seed for the numeric equivalence checks used by --check.",
        )
        self.common_options.add_argument(
            "--check",
            action="store_true",
            help="Re-read the printed result and confirm it matches.",
        )
        self.common_options.add_argument(
            "--verbose", action="store_true", help="Also log to stderr."
        )

        self.parser = argparse.ArgumentParser(
            prog="grg", description="Symbolic tensor calculus on a declared manifold."
        )
        self.subparsers = self.parser.add_subparsers(dest="command", required=True)
        self.commands = {}
        self.error_handlers = []

    def load_extension(self, name: str) -> None:
        module = importlib.import_module(name)
        module.setup(self)

    def _verbose(self) -> None:
        if any(getattr(h, "_grg_verbose", False) for h in logger.handlers):
            return
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(logging.Formatter("%(levelname)s:%(name)s: %(message)s"))
        stream._grg_verbose = True  # type: ignore
        logger.addHandler(stream)
        logger.setLevel(logging.DEBUG)

    def run(self, argv: typing.Sequence[str] | None = None) -> int:
        args = self.parser.parse_args(argv)
        if args.verbose:
            self._verbose()

        ctx = utils.CommandContext(self, args, Session())
        try:
            if args.spec:
                models.open_spec(ctx.session, models.load_spec(args.spec))
            elif args.command not in SPECLESS_COMMANDS:
                raise utils.SpecError(f"{args.command} needs --spec.")

            return self.commands[args.command](ctx) or 0
        except Exception as e:
            for error_handler in self.error_handlers:
                code = error_handler(ctx, e)
                if code is not None:
                    return code

            utils.error_handle(e)
            return 1


def main(argv: typing.Sequence[str] | None = None) -> int:
    cli = GRGCli()
    for ext in utils.get_all_extensions(os.environ["DIRECTORY_OF_GRG"]):
        cli.load_extension(ext)
    return cli.run(argv)


if __name__ == "__main__":
    sys.exit(main())
