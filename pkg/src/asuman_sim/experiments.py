"""Replication ensembles and parameter sweeps."""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, NamedTuple, Optional, Sequence

from . import telemetry
from .engine import SimConfig, simulate
from .metrics import merge
from .scenario import RunPlan, Scenario, apply_override
from .types.exceptions import InvalidArgumentError
from .types.network import NetworkSpec, policy_label
from .types.results import EnsembleStatistics, RunStatistics

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 63) - 1


def derive_seed(base: int, point: int, replication: int) -> int:
    """Seed of replication ``replication`` at sweep point ``point``; stable across processes."""
    digest = hashlib.blake2b(f"{point}:{replication}".encode("ascii"), digest_size=8).digest()
    return (base ^ int.from_bytes(digest, "big")) & _SEED_MASK


def replication_configs(spec: NetworkSpec, plan: RunPlan, point: int = 0) -> List[SimConfig]:
    return [
        SimConfig(
            spec=spec,
            horizon_epochs=plan.epochs,
            warmup_epochs=plan.warmup_epochs,
            seed=derive_seed(plan.seed, point, r),
            replication=r,
        )
        for r in range(plan.replications)
    ]


def _run_configs(configs: Sequence[SimConfig], jobs: int) -> List[RunStatistics]:
    """Simulate ``configs`` in input order, on up to ``jobs`` worker processes."""
    if jobs < 1:
        raise InvalidArgumentError(f"jobs must be >= 1, got {jobs}")
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(configs))) as pool:
            return list(pool.map(simulate, configs))
    return [simulate(cfg) for cfg in configs]


def _merge_runs(spec: NetworkSpec, runs: List[RunStatistics]) -> EnsembleStatistics:
    for run in runs:
        logger.info(
            "replication %d: policy=%s n=%d seed=%d mean=%.6g",
            run.replication,
            policy_label(spec.policy),
            spec.n,
            run.seed,
            run.network_mean,
        )
    runs.sort(key=lambda r: r.replication)
    return merge(*runs)


def run_ensemble(spec: NetworkSpec, plan: RunPlan, jobs: int = 1, point: int = 0) -> EnsembleStatistics:
    """Run every replication of ``spec`` and merge them.

    With ``jobs > 1`` replications run in worker processes; results are
    ordered by replication index regardless of completion order.
    """
    if jobs < 1:
        raise InvalidArgumentError(f"jobs must be >= 1, got {jobs}")
    configs = replication_configs(spec, plan, point)
    attributes = {
        telemetry.ATTR_SPEC_KEY: spec.key(),
        telemetry.ATTR_POLICY: policy_label(spec.policy),
        telemetry.ATTR_NODES: spec.n,
        telemetry.ATTR_EPOCHS: plan.epochs,
    }
    with telemetry.trace("asuman_sim.run_ensemble", attributes=attributes):
        return _merge_runs(spec, _run_configs(configs, jobs))


class SweepPoint(NamedTuple):
    value: float
    stats: EnsembleStatistics
    scenario: Scenario


@telemetry.traced(name="asuman_sim.run_sweep")
def run_sweep(
    scenario: Scenario,
    parameter: str,
    values: Sequence[float],
    jobs: int = 1,
    *,
    plan: Optional[RunPlan] = None,
) -> List[SweepPoint]:
    """One ensemble per value, in input order.

    Point ``s`` always uses the seeds ``derive_seed(seed, s, r)``, so two
    sweeps over the same values with different policies share their seeds.
    Every replication of every point goes to one worker pool, so ``jobs``
    workers stay busy even when a point has fewer replications than that.
    """
    if not values:
        raise InvalidArgumentError("sweep needs at least one value")
    at_points = [apply_override(scenario, parameter, value) for value in values]
    configs: List[SimConfig] = []
    offsets = [0]
    for s, (value, at_point) in enumerate(zip(values, at_points)):
        label = policy_label(at_point.spec.policy)
        logger.info("sweep %s=%g: n=%d policy=%s", parameter, value, at_point.spec.n, label)
        configs.extend(replication_configs(at_point.spec, plan or at_point.plan, point=s))
        offsets.append(len(configs))
    runs = _run_configs(configs, jobs)
    return [
        SweepPoint(value, _merge_runs(at_point.spec, runs[start:stop]), at_point)
        for value, at_point, start, stop in zip(values, at_points, offsets, offsets[1:])
    ]
