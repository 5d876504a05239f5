"""Process-wide settings loaded from environment variables."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import List

from .telemetry import _truthy
from .types.exceptions import ConfigurationError

DEFAULT_WARMUP_FRACTION = 0.2


@dataclass
class SimSettings:
    """Defaults for the CLI and experiment runners.

    All values can be overridden via ``ASUMAN_SIM_*`` environment variables,
    and command-line flags override those.
    """

    jobs: int = 1
    log_level: str = "warning"
    warmup_fraction: float = DEFAULT_WARMUP_FRACTION
    progress: bool = True

    @classmethod
    def from_env(cls) -> "SimSettings":
        """Load settings from ``ASUMAN_SIM_`` prefixed environment variables."""
        try:
            settings = cls(
                jobs=int(os.environ.get("ASUMAN_SIM_JOBS", "1")),
                log_level=os.environ.get("ASUMAN_SIM_LOG_LEVEL", "warning").lower(),
                warmup_fraction=float(os.environ.get("ASUMAN_SIM_WARMUP_FRACTION", str(DEFAULT_WARMUP_FRACTION))),
                progress=_truthy(os.environ.get("ASUMAN_SIM_PROGRESS"), default=True),
            )
        except ValueError as exc:
            raise ConfigurationError([f"bad ASUMAN_SIM_* environment value: {exc}"]) from exc
        problems = settings.problems()
        if problems:
            raise ConfigurationError(problems)
        return settings

    def problems(self) -> List[str]:
        out: List[str] = []
        if self.jobs < 1:
            out.append(f"ASUMAN_SIM_JOBS must be >= 1, got {self.jobs}")
        if not 0 <= self.warmup_fraction < 1:
            out.append(f"ASUMAN_SIM_WARMUP_FRACTION must lie in [0, 1), got {self.warmup_fraction}")
        # getLevelName maps a known name back to its numeric level.
        if not isinstance(logging.getLevelName(self.log_level.upper()), int):
            out.append(f"unknown log level {self.log_level!r}")
        return out

    @property
    def level(self) -> int:
        return int(logging.getLevelName(self.log_level.upper()))
