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


class InvariantCMDS(utils.Extension):
    def __init__(self, cli: utils.GRGBase) -> None:
        self.name = "Invariant"
        super().__init__(cli)

    @utils.command("invariant", help="Print curvature invariants.")
    @utils.option(
        "--which",
        default="all",
        help="R1, R2, R3, W1, W2, M1-M5, kretschmann, ricciScalar or all.",
    )
    def invariant(self, ctx: utils.CommandContext) -> int:
        results = query_utils.invariant(ctx.session, ctx.args.which)

        if ctx.json:
            reports = [report for _, report in results]
            ctx.send(models.msgspec_dumps(reports if len(reports) > 1 else reports[0]))
        elif len(results) == 1:
            ctx.send(results[0][1].expression)
        else:
            for _, report in results:
                ctx.send(f"{report.invariant} = {report.expression}")

        code = 0
        for value, report in results:
            code = max(code, query_utils.verify(ctx, report.expression, value))
        return code


def setup(cli: utils.GRGBase) -> None:
    InvariantCMDS(cli)
