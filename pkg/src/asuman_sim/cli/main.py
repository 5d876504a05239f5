"""asuman-sim CLI entry point.

Usage:
    asuman-sim simulate --scenario net.json --out ages.csv
    asuman-sim sweep --scenario net.json --sweep n=50,100,200,400 --jobs 4
    asuman-sim bounds asuman-limit --lambda-e 2 --lambda 1
    asuman-sim bounds --all --lambda-e 1 --lambda 1 --n 100 --q 0.5 --c 10 --p 0.5
    asuman-sim validate --level quick
"""

import argparse
import logging
import sys
from typing import NoReturn, Optional, Sequence

from .. import __version__
from ..config import SimSettings
from ..telemetry import setup_logging
from ..types.exceptions import ConfigurationError, InvalidArgumentError
from ._common import EXIT_CONFIG, EXIT_IO, report_violations

logger = logging.getLogger("asuman_sim.cli")


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1); exit 2 is reserved for I/O."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser(settings: Optional[SimSettings] = None) -> argparse.ArgumentParser:
    settings = settings or SimSettings()
    parser = _Parser(
        prog="asuman-sim",
        description="Simulate version-age gossip networks and evaluate their analytic bounds",
    )
    parser.add_argument("--version", "-V", action="version", version=f"asuman-sim {__version__}")
    parser.add_argument(
        "--log-level",
        dest="log_level",
        default=settings.log_level,
        help="Logging level for stderr (or set ASUMAN_SIM_LOG_LEVEL; default: %(default)s)",
    )

    # Lazy import command modules so ``--help`` stays fast
    from .cmd_bounds import register_bounds_parser
    from .cmd_simulate import register_simulate_parser
    from .cmd_sweep import register_sweep_parser
    from .cmd_validate import register_validate_parser

    subparsers = parser.add_subparsers(dest="command")
    register_simulate_parser(subparsers, settings)
    register_sweep_parser(subparsers, settings)
    register_bounds_parser(subparsers, settings)
    register_validate_parser(subparsers, settings)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    try:
        settings = SimSettings.from_env()
    except ConfigurationError as exc:
        report_violations(exc)
        sys.exit(EXIT_CONFIG)

    parser = build_parser(settings)
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        sys.exit(0)

    if not hasattr(args, "func"):
        parser.parse_args([args.command, "--help"])
        sys.exit(0)

    level = logging.getLevelName(str(args.log_level).upper())
    if not isinstance(level, int):
        parser.error(f"unknown log level {args.log_level!r}")
    setup_logging(level, labels={"command": args.command})
    args.settings = settings

    try:
        code = args.func(args)
    except (ConfigurationError, InvalidArgumentError) as exc:
        report_violations(exc)
        code = EXIT_CONFIG
    except OSError as exc:
        print(f"asuman-sim: I/O error: {exc}", file=sys.stderr)
        code = EXIT_IO
    sys.exit(code)


if __name__ == "__main__":
    main()
