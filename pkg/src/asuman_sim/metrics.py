"""
Age integration, epoch statistics, ensemble aggregation and scaling-law fits.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .types.exceptions import InvalidArgumentError
from .types.results import EnsembleStatistics, RunStatistics, ScalingFit

logger = logging.getLogger(__name__)


class AgeAccumulator:
    """Per-node age integrals over the measurement window of one run.

    Trajectories are piecewise constant, so integration is exact: every
    segment contributes ``age * dt``.
    """

    def __init__(self, n: int) -> None:
        if n < 1:
            raise InvalidArgumentError(f"accumulator needs n >= 1, got {n}")
        self._integrals = np.zeros(n, dtype=float)
        self._window = 0.0
        self._min_ages: List[int] = []
        self.event_counts: Counter = Counter()

    @property
    def n(self) -> int:
        return len(self._integrals)

    @property
    def window(self) -> float:
        return self._window

    @property
    def integrals(self) -> np.ndarray:
        return self._integrals.copy()

    @property
    def min_age_samples(self) -> Tuple[int, ...]:
        return tuple(self._min_ages)

    def accumulate(self, ages: Sequence[float], dt: float) -> None:
        """Add ``ages[i] * dt`` to node ``i``; the ages hold over the whole segment."""
        if dt < 0:
            raise InvalidArgumentError(f"segment length must be nonnegative, got {dt}")
        if len(ages) != self.n:
            raise InvalidArgumentError(f"expected {self.n} ages, got {len(ages)}")
        if dt == 0:
            return
        self._integrals += np.asarray(ages, dtype=float) * dt
        self._window += dt

    def add_integrals(self, integrals: Sequence[float], window: float) -> None:
        """Fold in integrals computed elsewhere over a window of length ``window``."""
        values = np.asarray(integrals, dtype=float)
        if window < 0:
            raise InvalidArgumentError(f"window length must be nonnegative, got {window}")
        if values.shape != self._integrals.shape:
            raise InvalidArgumentError(f"expected {self.n} integrals, got {values.shape}")
        if np.any(values < 0):
            raise InvalidArgumentError("age integrals must be nonnegative")
        self._integrals += values
        self._window += window

    def record_min_age(self, value: int) -> None:
        self._min_ages.append(int(value))

    def means(self) -> np.ndarray:
        if not self._window > 0:
            raise InvalidArgumentError("measurement window must be positive at finalize")
        return self._integrals / self._window

    def finalize(
        self,
        *,
        replication: int,
        seed: int,
        spec_key: str,
        epochs: int,
        not_min_fraction: Optional[Sequence[float]] = None,
    ) -> RunStatistics:
        means = self.means()
        samples = self._min_ages
        return RunStatistics(
            node_means=tuple(float(x) for x in means),
            network_mean=float(np.mean(means)),
            min_age_mean=epoch_min_age_mean(samples, len(samples) // 2) if samples else None,
            replication=replication,
            seed=seed,
            spec_key=spec_key,
            window=self._window,
            epochs=epochs,
            min_age_series=tuple(samples),
            event_counts=dict(self.event_counts),
            not_min_fraction=None if not_min_fraction is None else tuple(float(x) for x in not_min_fraction),
        )


def epoch_min_age_mean(samples: Sequence[float], k0: int = 0) -> float:
    """Mean of ``samples[k0:]``, the late-epoch estimate of the minimum-age limit."""
    if k0 < 0 or k0 >= len(samples):
        raise InvalidArgumentError(f"no min-age samples at or after epoch {k0} (have {len(samples)})")
    return float(np.mean(np.asarray(samples[k0:], dtype=float)))


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------


def merge(*items: Union[RunStatistics, EnsembleStatistics]) -> EnsembleStatistics:
    """Combine runs and ensembles of one spec into a single ensemble.

    Runs are flattened and ordered by ``(replication, seed)`` before any
    arithmetic, so the result does not depend on argument order or grouping.
    """
    runs: List[RunStatistics] = []
    for item in items:
        if isinstance(item, EnsembleStatistics):
            if not item.runs:
                raise InvalidArgumentError("cannot merge an ensemble that does not carry its runs")
            runs.extend(item.runs)
        else:
            runs.append(item)
    if not runs:
        raise InvalidArgumentError("merge needs at least one run")

    keys = {r.spec_key for r in runs}
    if len(keys) > 1:
        raise InvalidArgumentError(f"cannot merge runs of different specs: {sorted(keys)}")
    sizes = {r.n for r in runs}
    if len(sizes) > 1:
        raise InvalidArgumentError(f"cannot merge runs with different node counts: {sorted(sizes)}")

    runs.sort(key=lambda r: (r.replication, r.seed))
    node_matrix = np.array([r.node_means for r in runs], dtype=float)
    network = np.array([r.network_mean for r in runs], dtype=float)
    reps = len(runs)

    node_stderr: Optional[Tuple[float, ...]] = None
    network_stderr: Optional[float] = None
    if reps > 1:
        node_stderr = tuple(float(x) for x in node_matrix.std(axis=0, ddof=1) / math.sqrt(reps))
        network_stderr = float(network.std(ddof=1) / math.sqrt(reps))

    min_ages = [r.min_age_mean for r in runs if r.min_age_mean is not None]
    return EnsembleStatistics(
        node_means=tuple(float(x) for x in node_matrix.mean(axis=0)),
        node_stderr=node_stderr,
        network_mean=float(network.mean()),
        network_stderr=network_stderr,
        min_age_mean=float(np.mean(min_ages)) if min_ages else None,
        replications=reps,
        spec_key=runs[0].spec_key,
        runs=tuple(runs),
    )


# ---------------------------------------------------------------------------
# Scaling laws
# ---------------------------------------------------------------------------

SCALING_MODELS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "constant": np.ones_like,
    "log": np.log,
    "quarter_power": lambda n: np.power(n, 0.25),
    "sqrt": np.sqrt,
    "linear": lambda n: n,
    "inverse": lambda n: 1.0 / n,
    "inv_sqrt": lambda n: 1.0 / np.sqrt(n),
}


def _points(points: Iterable[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    pairs = [(float(n), float(a)) for n, a in points]
    if len(pairs) < 3:
        raise InvalidArgumentError(f"scaling fit needs at least 3 points, got {len(pairs)}")
    ns = np.array([p[0] for p in pairs])
    ages = np.array([p[1] for p in pairs])
    if len(np.unique(ns)) != len(ns):
        raise InvalidArgumentError("scaling fit needs distinct n values")
    if np.any(ns <= 0):
        raise InvalidArgumentError("scaling fit needs positive n values")
    return ns, ages


def fit_scaling(points: Iterable[Tuple[float, float]], model: str) -> ScalingFit:
    """Least-squares fit of ``a ~ alpha * g(n) + beta``.

    ``constant`` fits only ``beta`` and reports ``alpha = 0``.
    """
    if model not in SCALING_MODELS:
        raise InvalidArgumentError(f"unknown scaling model {model!r}; choose from {sorted(SCALING_MODELS)}")
    ns, ages = _points(points)

    if model == "constant":
        beta = float(np.mean(ages))
        residual = float(np.sum((ages - beta) ** 2))
        return ScalingFit(model=model, coefficient=0.0, offset=beta, residual=residual, points=len(ns))

    design = np.column_stack([SCALING_MODELS[model](ns), np.ones_like(ns)])
    (alpha, beta), *_ = np.linalg.lstsq(design, ages, rcond=None)
    residual = float(np.sum((design @ np.array([alpha, beta]) - ages) ** 2))
    return ScalingFit(model=model, coefficient=float(alpha), offset=float(beta), residual=residual, points=len(ns))


def select_model(
    points: Iterable[Tuple[float, float]],
    models: Sequence[str] = tuple(SCALING_MODELS),
    *,
    noise: Optional[float] = None,
    z: float = 3.0,
) -> ScalingFit:
    """Best fit by residual variance ``RSS / (N - p)``; ties go to the earlier model.

    With ``noise`` (the standard error of a single point) the constant model
    wins outright when its residual standard error is within ``z * noise``,
    so sampling scatter alone never selects a growth law. Growth models whose
    fitted coefficient is not positive describe a decreasing age and are
    dropped from the comparison.
    """
    pts = list(points)
    fits = [fit_scaling(pts, m) for m in models]
    if not fits:
        raise InvalidArgumentError("select_model needs at least one model")
    if noise is not None:
        if not math.isfinite(noise) or noise < 0:
            raise InvalidArgumentError(f"noise must be finite and >= 0, got {noise}")
        constant = next((f for f in fits if f.model == "constant"), None)
        if constant is not None and math.sqrt(constant.residual_variance) <= z * noise:
            logger.debug("scaling fits: constant within %.3g x noise %.3g", z, noise)
            return constant
    candidates = [f for f in fits if f.bounded or f.coefficient > 0] or fits
    best = min(candidates, key=lambda f: f.residual_variance)
    logger.debug("scaling fits: %s -> %s", {f.model: f.residual_variance for f in fits}, best.model)
    return best


def rank_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation of ``x`` and ``y``."""
    if len(x) != len(y) or len(x) < 2:
        raise InvalidArgumentError("rank correlation needs two equal-length sequences of at least 2 values")
    rho, _ = stats.spearmanr(x, y)
    return float(rho)
