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
import common.query_utils as query_utils
import common.utils as utils


class LaplacianCMDS(utils.Extension):
    def __init__(self, cli: utils.GRGBase) -> None:
        self.name = "Laplacian"
        super().__init__(cli)

    @utils.command("laplacian", help="Print the scalar Laplacian of a function.")
    @utils.option(
        "--fn",
        default="f",
        help="A function name (opaque in every coordinate) or an expression.",
    )
    def laplacian(self, ctx: utils.CommandContext) -> int:
        value, report = query_utils.laplacian(ctx.session, ctx.args.fn)

        if ctx.json:
            ctx.send(models.msgspec_dumps(report))
        else:
            ctx.send(report.expression)
        return query_utils.verify(ctx, report.expression, value)


def setup(cli: utils.GRGBase) -> None:
    LaplacianCMDS(cli)
