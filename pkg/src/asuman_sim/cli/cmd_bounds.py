"""``asuman-sim bounds``: evaluate closed-form bounds and bounding recurrences."""

from __future__ import annotations

import argparse
import logging
from typing import List

from ..bounds import (
    BOUND_NAMES,
    RECURRENCE_KINDS,
    BoundParams,
    RecurrenceParams,
    bound_table,
    evaluate_bound,
    mc_recurrence,
    render_csv,
    render_text,
    reports_as_dicts,
)
from ..config import SimSettings
from ..types.exceptions import InvalidArgumentError
from ..types.results import BoundReport, RecurrenceEstimate
from ._common import EXIT_OK, add_output_arguments, csv_lines, dumps, write_output

logger = logging.getLogger(__name__)

FORMATS = ("text", "csv", "json")


def register_bounds_parser(subparsers: argparse._SubParsersAction, settings: SimSettings) -> None:
    parser = subparsers.add_parser(
        "bounds",
        help="Evaluate analytic age bounds",
        description=f"Bounds: {', '.join(BOUND_NAMES)}",
    )
    parser.add_argument("name", nargs="?", help="Bound to evaluate (see --list)")
    parser.add_argument("--all", action="store_true", help="Evaluate every bound the given parameters allow")
    parser.add_argument("--list", action="store_true", help="List bound names and exit")
    parser.add_argument(
        "--recurrence",
        choices=RECURRENCE_KINDS,
        help="Print the Monte-Carlo mean of a bounding recurrence per epoch instead",
    )
    parser.add_argument("--k-max", dest="k_max", type=int, default=50, help="Recurrence horizon (default: %(default)s)")
    parser.add_argument(
        "--replications", "-r", type=int, default=10000, help="Recurrence replications (default: %(default)s)"
    )
    parser.add_argument("--seed", type=int, default=0, help="Recurrence seed (default: %(default)s)")
    parser.add_argument(
        "--finite-n", dest="finite_n", action="store_true", help="Use finite-n branch probabilities in recurrences"
    )

    group = parser.add_argument_group("parameters")
    group.add_argument("--lambda-e", dest="lambda_e", type=float, help="Source self-update rate")
    group.add_argument("--lambda", dest="lambda_total", type=float, help="Total source-to-network rate")
    group.add_argument("--n", type=int, help="Number of nodes")
    group.add_argument("--B", dest="gossip_capacity", type=float, help="Total gossip capacity (default: n * lambda)")
    group.add_argument("--q", type=float, help="Partial connectivity fraction")
    group.add_argument("--c", type=int, help="Number of clusters")
    group.add_argument("--m", type=int, help="Leaves per cluster")
    group.add_argument("--p", type=float, help="Head relay share of lambda")
    group.add_argument("--nu", type=float, help="Power-law profile ratio")
    group.add_argument("--i", type=int, help="Node index for power-law bounds (1-based)")
    group.add_argument("--k", type=int, help="Epoch index for per-epoch bounds")
    group.add_argument("--a1", type=float, help="Cluster-head age for leaf bounds")
    group.add_argument("--C", dest="c_coeff", type=float, default=0.0, help="Sensing coefficient for recurrences")
    add_output_arguments(parser, FORMATS, "text")
    parser.set_defaults(func=run_bounds)


def _bound_params(args: argparse.Namespace) -> BoundParams:
    flags = (("--lambda-e", args.lambda_e), ("--lambda", args.lambda_total))
    missing = [flag for flag, value in flags if value is None]
    if missing:
        raise InvalidArgumentError(f"bounds needs {' and '.join(missing)}")
    return BoundParams(
        lambda_e=args.lambda_e,
        lambda_total=args.lambda_total,
        n=args.n,
        gossip_capacity=args.gossip_capacity,
        q=args.q,
        c=args.c,
        m=args.m,
        p=args.p,
        nu=args.nu,
        i=args.i,
        k=args.k,
        a1=args.a1,
    )


def render_reports(reports: List[BoundReport], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(reports)
    if fmt == "json":
        return dumps(reports_as_dicts(reports))
    return render_text(reports)


def render_recurrence(estimate: RecurrenceEstimate, fmt: str) -> str:
    if fmt == "json":
        return dumps(
            {
                "kind": estimate.kind,
                "replications": estimate.replications,
                "seed": estimate.seed,
                "mean": estimate.mean.tolist(),
                "stderr": estimate.stderr.tolist(),
                "extras": dict(estimate.extras),
            }
        )
    pairs = list(zip(estimate.mean.tolist(), estimate.stderr.tolist()))
    if fmt == "csv":
        rows = [[str(k), f"{m:.10g}", f"{s:.10g}"] for k, (m, s) in enumerate(pairs)]
        return csv_lines(("k", "mean", "stderr"), rows)
    lines = [f"# {estimate.kind}: {estimate.replications} replications, seed {estimate.seed}"]
    lines.extend(f"{k:>6}  {m:>12.6g}  {s:>10.3g}" for k, (m, s) in enumerate(pairs))
    for key, value in sorted(estimate.extras.items()):
        lines.append(f"# {key} = {value:.6g}")
    return "\n".join(lines) + "\n"


def run_bounds(args: argparse.Namespace) -> int:
    if args.list:
        write_output("\n".join(BOUND_NAMES) + "\n", args.out)
        return EXIT_OK

    params = _bound_params(args)

    if args.recurrence:
        rec = RecurrenceParams(
            lambda_e=params.lambda_e,
            lambda_total=params.lambda_total,
            n=params.n,
            q=params.q,
            c_coeff=args.c_coeff,
            gossip_capacity=params.gossip_capacity,
            p=params.p,
            c=params.c,
        )
        estimate = mc_recurrence(
            args.recurrence, rec, args.k_max, args.replications, args.seed, limit=not args.finite_n
        )
        write_output(render_recurrence(estimate, args.format), args.out)
        return EXIT_OK

    if args.all:
        reports = bound_table(params)
    elif args.name:
        reports = [evaluate_bound(args.name, params)]
    else:
        raise InvalidArgumentError("bounds needs a bound name, --all, --list or --recurrence")
    logger.debug("evaluated %d bounds", len(reports))
    write_output(render_reports(reports, args.format), args.out)
    return EXIT_OK
