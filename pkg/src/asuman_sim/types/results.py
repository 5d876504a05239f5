"""
Result types: per-run statistics, ensembles, fits, bound reports and
acceptance outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

# Scaling models that settle to a finite limit as n grows; the others grow without bound.
BOUNDED_SCALING_MODELS: Tuple[str, ...] = ("constant", "inverse", "inv_sqrt")


class BoundKind(str, Enum):
    """What a closed-form value claims about the average age."""

    UPPER = "upper"
    LOWER = "lower"
    LIMIT = "limit"
    EXACT = "exact"


@dataclass(frozen=True)
class RunStatistics:
    """Time-averaged ages of one replication."""

    node_means: Tuple[float, ...]
    network_mean: float
    min_age_mean: Optional[float]
    replication: int
    seed: int
    spec_key: str
    window: float
    epochs: int
    min_age_series: Tuple[int, ...] = field(default=(), repr=False)
    event_counts: Mapping[str, int] = field(default_factory=dict)
    # None under uniform gossip, where nobody senses.
    not_min_fraction: Optional[Tuple[float, ...]] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.node_means)


@dataclass(frozen=True)
class EnsembleStatistics:
    """Means across replications. Standard errors are ``None`` for a single run."""

    node_means: Tuple[float, ...]
    node_stderr: Optional[Tuple[float, ...]]
    network_mean: float
    network_stderr: Optional[float]
    min_age_mean: Optional[float]
    replications: int
    spec_key: str
    runs: Tuple[RunStatistics, ...] = field(default=(), repr=False)

    def upper_ci(self, z: float = 3.0) -> float:
        """Network mean plus ``z`` standard errors (just the mean when R = 1)."""
        return self.network_mean + z * (self.network_stderr or 0.0)

    def lower_ci(self, z: float = 3.0) -> float:
        return self.network_mean - z * (self.network_stderr or 0.0)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit ``a ~ coefficient * g(n) + offset``."""

    model: str
    coefficient: float
    offset: float
    residual: float
    points: int

    @property
    def parameters(self) -> int:
        return 1 if self.model == "constant" else 2

    @property
    def residual_variance(self) -> float:
        dof = self.points - self.parameters
        return self.residual / dof if dof > 0 else float("inf")

    @property
    def bounded(self) -> bool:
        return self.model in BOUNDED_SCALING_MODELS


@dataclass(frozen=True)
class BoundReport:
    """One evaluated closed form."""

    name: str
    parameters: Mapping[str, Any]
    value: float
    kind: BoundKind

    def params_text(self) -> str:
        return " ".join(f"{k}={_fmt(v)}" for k, v in self.parameters.items())


@dataclass(frozen=True)
class RecurrenceEstimate:
    """Monte-Carlo means of a bounding recurrence; index ``k`` is epoch ``k`` (index 0 is the start value 0)."""

    kind: str
    mean: np.ndarray = field(repr=False)
    stderr: np.ndarray = field(repr=False)
    replications: int
    seed: int
    # Side quantities of a recurrence, e.g. the simulated head age of ``cluster_min_age``.
    extras: Mapping[str, float] = field(default_factory=dict)

    @property
    def k_max(self) -> int:
        return len(self.mean) - 1

    def tail_mean(self, k0: int) -> float:
        return float(np.mean(self.mean[k0:]))


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one acceptance criterion."""

    number: int
    name: str
    passed: bool
    measured: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
