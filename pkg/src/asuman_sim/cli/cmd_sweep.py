"""``asuman-sim sweep``: one ensemble per parameter value, one output block per value."""

from __future__ import annotations

import argparse
import dataclasses
import logging
from typing import Any, Dict, List, Mapping, Optional, Sequence

from .._cli_progress import PHASE_SIMULATING
from ..config import SimSettings
from ..experiments import SweepPoint, run_sweep
from ..scenario import RunPlan, load_scenario, parse_sweep
from ..types.exceptions import ScenarioError
from ._common import (
    AGE_COLUMNS,
    EXIT_OK,
    add_jobs_argument,
    add_output_arguments,
    age_rows,
    csv_lines,
    dumps,
    ensemble_json,
    gnuplot_header,
    spinner_for,
    write_output,
)
from .cmd_simulate import plan_from_args, render_ensemble

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "text")


def register_sweep_parser(subparsers: argparse._SubParsersAction, settings: SimSettings) -> None:
    parser = subparsers.add_parser("sweep", help="Sweep one parameter of a scenario")
    parser.add_argument("--scenario", "-s", required=True, help="Scenario JSON file")
    parser.add_argument(
        "spec", nargs="?", metavar="PARAM=V1,V2,...", help="Sweep, e.g. n=50,100,200 or n=50:400:50 (inclusive range)"
    )
    parser.add_argument("--sweep", dest="sweep_flag", metavar="PARAM=V1,V2,...", help="Same as the positional form")
    parser.add_argument("--seed", type=int, default=None, help="Override run.seed from the scenario")
    parser.add_argument("--replications", "-r", type=int, default=None, help="Override run.replications")
    parser.add_argument("--epochs", type=int, default=None, help="Override run.epochs")
    parser.add_argument(
        "--gnuplot-header", action="store_true", help="Prefix each CSV block with a gnuplot column comment"
    )
    add_jobs_argument(parser, settings.jobs)
    add_output_arguments(parser, FORMATS, "csv")
    parser.set_defaults(func=run_sweep_command)


def _format_value(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else f"{value:g}"


def render_sweep(parameter: str, points: Sequence[SweepPoint], fmt: str, *, gnuplot: bool = False) -> str:
    if fmt == "json":
        return dumps(
            [
                {
                    "parameter": parameter,
                    "value": p.value,
                    **ensemble_json(p.scenario.spec, p.stats, p.scenario.plan.seed),
                }
                for p in points
            ]
        )
    blocks: List[str] = []
    for p in points:
        header = f"# {parameter}={_format_value(p.value)}\n"
        if fmt == "text":
            blocks.append(header + render_ensemble(p.scenario.spec, p.stats, p.scenario.plan.seed, "text"))
            continue
        body = csv_lines(AGE_COLUMNS, age_rows(p.scenario.spec, p.stats, p.scenario.plan.seed))
        blocks.append(header + (gnuplot_header(AGE_COLUMNS) if gnuplot else "") + body)
    # gnuplot separates data sets with two blank lines
    return "\n\n".join(blocks)


def _sweep_text(args: argparse.Namespace) -> Optional[str]:
    return args.sweep_flag or args.spec


def run_sweep_command(args: argparse.Namespace) -> int:
    settings: SimSettings = getattr(args, "settings", None) or SimSettings()
    text = _sweep_text(args)
    if not text:
        raise ScenarioError(["sweep needs PARAM=V1,V2,... (positional or --sweep)"])
    parameter, values = parse_sweep(text)
    scenario = load_scenario(args.scenario, warmup_fraction=settings.warmup_fraction)
    plan = plan_from_args(args, scenario, settings)
    scenario = dataclasses.replace(scenario, plan=plan, document=_document_with_plan(scenario.document, plan))

    spinner = spinner_for(args)
    spinner.phase(PHASE_SIMULATING)
    try:
        points = run_sweep(scenario, parameter, values, jobs=args.jobs)
    finally:
        spinner.stop()
    spinner.finish(f"{len(points)} sweep points over {parameter}")
    logger.info("sweep %s finished: %d points", parameter, len(points))

    write_output(render_sweep(parameter, points, args.format, gnuplot=args.gnuplot_header), args.out)
    return EXIT_OK


def _document_with_plan(document: Mapping[str, Any], plan: RunPlan) -> Dict[str, Any]:
    doc = dict(document)
    doc["run"] = {
        "epochs": plan.epochs,
        "warmup_epochs": plan.warmup_epochs,
        "replications": plan.replications,
        "seed": plan.seed,
    }
    return doc
