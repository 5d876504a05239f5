"""Helpers shared by the CLI commands: exit codes, output sinks and CSV rows."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from .._cli_progress import PhaseSpinner
from ..types.exceptions import ConfigurationError
from ..types.network import NetworkSpec, policy_label
from ..types.results import EnsembleStatistics

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_VALIDATION = 3

AGE_COLUMNS = ("n", "policy", "node_id", "mean_age", "stderr", "replications", "seed")


def report_violations(exc: Exception) -> None:
    """Print every violation of a configuration error on its own stderr line."""
    violations = getattr(exc, "violations", None)
    if isinstance(exc, ConfigurationError) and violations:
        for line in violations:
            print(f"asuman-sim: {line}", file=sys.stderr)
    else:
        print(f"asuman-sim: {exc}", file=sys.stderr)


def write_output(text: str, out: Optional[str]) -> None:
    """Write to ``out`` or stdout. ``OSError`` propagates to the exit-code mapping."""
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def add_output_arguments(parser: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
    parser.add_argument("--out", "-o", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=list(formats), default=default, help="Output format (default: %(default)s)")


def add_jobs_argument(parser: argparse.ArgumentParser, default: int) -> None:
    parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=default,
        help="Parallel worker processes (or set ASUMAN_SIM_JOBS; default: %(default)s)",
    )


def spinner_for(args: argparse.Namespace) -> PhaseSpinner:
    settings = getattr(args, "settings", None)
    enabled = None if settings is None or settings.progress else False
    return PhaseSpinner(enabled=enabled)


def _num(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.10g}"


def age_rows(spec: NetworkSpec, stats: EnsembleStatistics, seed: int) -> List[List[str]]:
    """Per-node rows plus the ``network`` aggregate row."""
    label = policy_label(spec.policy)
    rows = []
    for i, mean in enumerate(stats.node_means):
        err = stats.node_stderr[i] if stats.node_stderr is not None else None
        rows.append([str(spec.n), label, str(i), _num(mean), _num(err), str(stats.replications), str(seed)])
    rows.append(
        [
            str(spec.n),
            label,
            "network",
            _num(stats.network_mean),
            _num(stats.network_stderr),
            str(stats.replications),
            str(seed),
        ]
    )
    return rows


def csv_lines(header: Iterable[str], rows: Iterable[Sequence[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def gnuplot_header(columns: Sequence[str]) -> str:
    return "# " + " ".join(f"{i}:{name}" for i, name in enumerate(columns, start=1)) + "\n"


def ensemble_json(spec: NetworkSpec, stats: EnsembleStatistics, seed: int) -> Any:
    return {
        "n": spec.n,
        "policy": policy_label(spec.policy),
        "spec_key": stats.spec_key,
        "replications": stats.replications,
        "seed": seed,
        "network": {
            "mean_age": stats.network_mean,
            "stderr": stats.network_stderr,
            "min_age_mean": stats.min_age_mean,
        },
        "nodes": [
            {
                "node_id": i,
                "mean_age": mean,
                "stderr": stats.node_stderr[i] if stats.node_stderr is not None else None,
            }
            for i, mean in enumerate(stats.node_means)
        ],
    }


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"
