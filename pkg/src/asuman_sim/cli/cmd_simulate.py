"""``asuman-sim simulate``: run one scenario and report per-node mean ages."""

from __future__ import annotations

import argparse
import logging

from .._cli_progress import PHASE_SIMULATING
from ..config import SimSettings
from ..experiments import run_ensemble
from ..scenario import RunPlan, Scenario, load_scenario, override_plan
from ..types.network import NetworkSpec
from ..types.results import EnsembleStatistics
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

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "text")


def register_simulate_parser(subparsers: argparse._SubParsersAction, settings: SimSettings) -> None:
    parser = subparsers.add_parser("simulate", help="Run one scenario and report mean ages")
    parser.add_argument("--scenario", "-s", required=True, help="Scenario JSON file")
    parser.add_argument("--seed", type=int, default=None, help="Override run.seed from the scenario")
    parser.add_argument("--replications", "-r", type=int, default=None, help="Override run.replications")
    parser.add_argument("--epochs", type=int, default=None, help="Override run.epochs")
    parser.add_argument(
        "--gnuplot-header", action="store_true", help="Prefix CSV output with a gnuplot column comment"
    )
    add_jobs_argument(parser, settings.jobs)
    add_output_arguments(parser, FORMATS, "csv")
    parser.set_defaults(func=run_simulate)


def render_ensemble(spec: NetworkSpec, stats: EnsembleStatistics, seed: int, fmt: str, *, gnuplot: bool = False) -> str:
    if fmt == "json":
        return dumps(ensemble_json(spec, stats, seed))
    if fmt == "text":
        lines = [
            spec.summary(),
            f"replications={stats.replications} seed={seed}",
            f"network mean age: {stats.network_mean:.6g}"
            + (f" +/- {stats.network_stderr:.3g}" if stats.network_stderr is not None else ""),
        ]
        if stats.min_age_mean is not None:
            lines.append(f"mean min age:     {stats.min_age_mean:.6g}")
        lines.append(f"{'node':>6}  {'mean age':>12}  {'stderr':>10}")
        for i, mean in enumerate(stats.node_means):
            err = stats.node_stderr[i] if stats.node_stderr is not None else None
            lines.append(f"{i:>6}  {mean:>12.6g}  {'' if err is None else f'{err:.3g}':>10}")
        return "\n".join(lines) + "\n"
    text = csv_lines(AGE_COLUMNS, age_rows(spec, stats, seed))
    return gnuplot_header(AGE_COLUMNS) + text if gnuplot else text


def plan_from_args(args: argparse.Namespace, scenario: Scenario, settings: SimSettings) -> RunPlan:
    """Apply the --seed, --replications and --epochs overrides to the scenario plan."""
    pinned_warmup = "warmup_epochs" in scenario.document.get("run", {})
    return override_plan(
        scenario.plan,
        seed=args.seed,
        replications=args.replications,
        epochs=args.epochs,
        warmup_fraction=None if pinned_warmup else settings.warmup_fraction,
    )


def run_simulate(args: argparse.Namespace) -> int:
    settings: SimSettings = getattr(args, "settings", None) or SimSettings()
    scenario = load_scenario(args.scenario, warmup_fraction=settings.warmup_fraction)
    plan = plan_from_args(args, scenario, settings)

    spinner = spinner_for(args)
    spinner.phase(PHASE_SIMULATING)
    try:
        stats = run_ensemble(scenario.spec, plan, jobs=args.jobs)
    finally:
        spinner.stop()
    spinner.finish(f"{plan.replications} replications of {scenario.spec.summary()}")
    logger.info("network mean age %.6g over %d replications", stats.network_mean, stats.replications)

    write_output(render_ensemble(scenario.spec, stats, plan.seed, args.format, gnuplot=args.gnuplot_header), args.out)
    return EXIT_OK
