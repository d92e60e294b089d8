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

import time
import typing
from pathlib import Path

import humanize
import orjson

import common.curvature as curvature
import common.models as models
import common.query_utils as query_utils
import common.symexpr as sx
import common.utils as utils

if typing.TYPE_CHECKING:
    from common.session import Session

Step: typing.TypeAlias = dict[str, typing.Any]


def read_script(path: str) -> list[Step]:
    try:
        script = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError:
        raise utils.SpecError(f"No script at {path!r}.") from None
    except orjson.JSONDecodeError as e:
        raise utils.SpecError(f"{path}: {e}") from None

    if not isinstance(script, list) or not all(
        isinstance(step, dict) and "op" in step for step in script
    ):
        raise utils.SpecError(
            f"{path}: a script is a JSON array of objects with an \"op\" field."
        )
    return script


def _indices(step: Step) -> tuple[int, ...]:
    indices = step.get("indices", [])
    if isinstance(indices, str):
        return utils.parse_indices(indices)
    return tuple(int(i) for i in indices)


def run_step(session: "Session", step: Step) -> tuple[list[str], typing.Any]:
    """Executes one script step; returns its text lines and its JSON payload."""
    match step["op"]:
        case "open":
            models.open_spec(session, models.load_spec(step["spec"]))
            coords = ", ".join(c.name for c in session.manifold.coords)
            return [f"opened ({coords})"], {"opened": step["spec"]}

        case "component":
            _, report = query_utils.component(session, step["tensor"], _indices(step))
            indices = ", ".join(map(str, report.indices))
            return [f"{report.tensor}({indices}) = {report.expression}"], report

        case "invariant":
            results = query_utils.invariant(session, step.get("which", "all"))
            reports = [report for _, report in results]
            return [f"{r.invariant} = {r.expression}" for r in reports], reports

        case "ricci_scalar":
            value = curvature.ricci_scalar(session)
            return [f"ricciScalar = {sx.to_text(value)}"], {"ricciScalar": value}

        case "laplacian":
            _, report = query_utils.laplacian(session, step.get("fn", "f"))
            return [report.expression], report

        case "cache":
            report = query_utils.cache(
                session,
                step.get("tensor"),
                step.get("action", "view"),
                step.get("scope", "self"),
            )
            return query_utils.format_cache(report), report

        case op:
            raise utils.SpecError(f"Unknown script op {op!r}.")


class RunCMDS(utils.Extension):
    def __init__(self, cli: utils.GRGBase) -> None:
        self.name = "Run"
        super().__init__(cli)

    @utils.command("run", help="Run a JSON script of queries in one session.")
    @utils.option("script", help="Path to a JSON array of query steps.")
    def run(self, ctx: utils.CommandContext) -> int:
        script = read_script(ctx.args.script)
        if not ctx.session.is_open and (not script or script[0]["op"] != "open"):
            raise utils.SpecError("run needs --spec or an \"open\" first step.")

        start = time.perf_counter()
        payloads: list[typing.Any] = []
        for step in script:
            lines, payload = run_step(ctx.session, step)
            payloads.append(payload)
            if not ctx.json:
                for line in lines:
                    ctx.send(line)

        counts = query_utils.evaluated_counts(ctx.session)
        utils.logger.info(
            "Ran %s steps in %s.",
            len(script),
            humanize.precisedelta(time.perf_counter() - start, minimum_unit="milliseconds"),
        )

        if ctx.json:
            ctx.send(models.msgspec_dumps(models.RunReport(payloads, counts)))
        else:
            ctx.send(
                "evaluated: " + ", ".join(f"{name}={count}" for name, count in counts.items())
            )
        return 0


def setup(cli: utils.GRGBase) -> None:
    RunCMDS(cli)
