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


class CacheCMDS(utils.Extension):
    def __init__(self, cli: utils.GRGBase) -> None:
        self.name = "Cache"
        super().__init__(cli)

    @utils.command("cache", help="Inspect or clear tensor caches.")
    @utils.option("--tensor", default=None, help="Tensor to report on.")
    @utils.option(
        "--action", choices=query_utils.CACHE_ACTIONS, default="view"
    )
    @utils.option(
        "--scope",
        choices=("self", "associated"),
        default="self",
        help="What retreat clears: the tensor alone, or its derived tensors too.",
    )
    @utils.option(
        "--warm",
        action="append",
        default=[],
        metavar="TENSOR:INDICES",
        help="Evaluate a component first, e.g. --warm=riemann:1,2,1,2. Repeatable.",
    )
    def cache(self, ctx: utils.CommandContext) -> int:
        for request in ctx.args.warm:
            name, _, indices = request.partition(":")
            ctx.session.tensor(name).component(utils.parse_indices(indices))

        report = query_utils.cache(
            ctx.session, ctx.args.tensor, ctx.args.action, ctx.args.scope
        )
        if ctx.json:
            ctx.send(models.msgspec_dumps(report))
        else:
            for line in query_utils.format_cache(report):
                ctx.send(line)
        return 0


def setup(cli: utils.GRGBase) -> None:
    CacheCMDS(cli)
