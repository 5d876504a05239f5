"""``asuman-sim validate``: run the acceptance criteria and report pass/fail."""

from __future__ import annotations

import argparse
import logging
from typing import List

from ..config import SimSettings
from ..types.exceptions import InvalidArgumentError
from ._common import EXIT_OK, EXIT_VALIDATION, add_jobs_argument, add_output_arguments, dumps, spinner_for, write_output

logger = logging.getLogger(__name__)

FORMATS = ("text", "json")


def _criteria(text: str) -> List[int]:
    try:
        numbers = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--only takes comma-separated criterion numbers: {exc}") from exc
    if not numbers or any(not 1 <= n <= 10 for n in numbers):
        raise argparse.ArgumentTypeError("criterion numbers lie in 1..10")
    return numbers


def register_validate_parser(subparsers: argparse._SubParsersAction, settings: SimSettings) -> None:
    parser = subparsers.add_parser("validate", help="Run the acceptance criteria")
    parser.add_argument("--level", choices=["quick", "full"], default="quick", help="Suite size (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=0, help="Base seed (default: %(default)s)")
    parser.add_argument("--only", type=_criteria, help="Run only these criteria, e.g. 1,2,10")
    add_jobs_argument(parser, settings.jobs)
    add_output_arguments(parser, FORMATS, "text")
    parser.set_defaults(func=run_validate)


def run_validate(args: argparse.Namespace) -> int:
    from ..validation import render_results, run_validation

    if args.jobs < 1:
        raise InvalidArgumentError(f"--jobs must be >= 1, got {args.jobs}")
    spinner = spinner_for(args)
    try:
        results = run_validation(args.level, seed=args.seed, jobs=args.jobs, only=args.only, spinner=spinner)
    finally:
        spinner.stop()
    failed = [r.number for r in results if not r.passed]
    spinner.finish(f"{len(results) - len(failed)}/{len(results)} criteria passed")

    if args.format == "json":
        text = dumps(
            [
                {
                    "number": r.number,
                    "name": r.name,
                    "status": r.status,
                    "measured": dict(r.measured),
                    "detail": r.detail,
                }
                for r in results
            ]
        )
    else:
        text = render_results(results)
    write_output(text, args.out)

    if failed:
        logger.warning("failed criteria: %s", ", ".join(map(str, failed)))
        return EXIT_VALIDATION
    return EXIT_OK
