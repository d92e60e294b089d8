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

import common.models as models
import common.utils as utils

# exit codes: 0 ok, 1 unexpected, 2 indices, 3 unknown tensor, 4 spec, 5 dimension


class OnCMDError(utils.Extension):
    def __init__(self, cli: utils.GRGBase) -> None:
        super().__init__(cli)
        cli.error_handlers.append(self.on_command_error)

    @staticmethod
    def handle_send(ctx: utils.CommandContext, error: utils.GRGError) -> None:
        if ctx.json:
            ctx.send(
                models.msgspec_dumps(
                    {
                        "error": type(error).__name__,
                        "message": str(error),
                        "exit_code": error.exit_code,
                    }
                )
            )
        ctx.warn(f"Error: {error}")

    def on_command_error(
        self, ctx: utils.CommandContext, error: Exception
    ) -> int | None:
        if isinstance(error, utils.GRGError):
            utils.logger.info("%s failed: %s", ctx.args.command, error)
            self.handle_send(ctx, error)
            return error.exit_code

        return None


def setup(cli: utils.GRGBase) -> None:
    OnCMDError(cli)
