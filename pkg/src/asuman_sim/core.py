"""Elementary version-age operations and spec validation."""

from __future__ import annotations

import math
from typing import FrozenSet, Iterable, List, Tuple

from .types.exceptions import ConfigurationError, InvalidArgumentError
from .types.network import (
    HEAD_POLICY_FOR_LINKS,
    AgeVector,
    Asuman,
    AsumanFrozen,
    Hierarchical,
    NetworkSpec,
    TopologyKind,
)

RATE_SUM_RTOL = 1e-9


def min_age_set(ages: AgeVector, subset: Iterable[int]) -> Tuple[FrozenSet[int], int]:
    """Return the indices of ``subset`` holding the minimum age, and that age.

    Minimum age is maximum version, so the scan runs over versions.
    """
    members = list(subset)
    if not members:
        raise InvalidArgumentError("min_age_set requires a nonempty subset")
    versions = ages.node_versions
    n = len(versions)
    for i in members:
        if not 0 <= i < n:
            raise InvalidArgumentError(f"node index {i} out of range for {n} nodes")
    best = max(versions[i] for i in members)
    winners = frozenset(i for i in members if versions[i] == best)
    return winners, ages.source_version - best


def _finite_nonneg(value: float) -> bool:
    return isinstance(value, (int, float)) and math.isfinite(value) and value >= 0


def validate_spec(spec: NetworkSpec) -> List[str]:
    """Collect every violation in ``spec``; an empty list means the spec is valid."""
    violations: List[str] = []
    topo, rates, profile, policy = spec.topology, spec.rates, spec.profile, spec.policy

    for name in ("lambda_e", "lambda_total", "gossip_capacity"):
        if not _finite_nonneg(getattr(rates, name)):
            violations.append(f"{name} must be finite and nonnegative")
    if _finite_nonneg(rates.lambda_total) and rates.lambda_total == 0:
        violations.append("lambda_total must be positive")

    if len(profile) != topo.n:
        violations.append(f"rate profile has {len(profile)} entries for {topo.n} nodes")
    if any(not _finite_nonneg(r) for r in profile):
        violations.append("per-node rates must be finite and nonnegative")
    elif _finite_nonneg(rates.lambda_total) and not math.isclose(
        profile.total, rates.lambda_total, rel_tol=RATE_SUM_RTOL, abs_tol=0.0
    ):
        violations.append(
            f"rate sum mismatch: per-node rates sum to {profile.total:.12g}, lambda is {rates.lambda_total:.12g}"
        )

    if topo.kind is TopologyKind.PARTIAL and (topo.q is None or not 0 < topo.q <= 1):
        violations.append(f"partial topology needs q in (0, 1], got {topo.q}")

    clustered = topo.kind is TopologyKind.CLUSTERED
    if isinstance(policy, Hierarchical) != clustered:
        violations.append(f"policy/topology mismatch: {policy.name} policy on {topo.kind.value} topology")
    elif isinstance(policy, Hierarchical) and topo.head_links is not None:
        if HEAD_POLICY_FOR_LINKS[topo.head_links] is not policy.head_policy:
            violations.append(
                f"policy/topology mismatch: head policy {policy.head_policy.value} "
                f"with head links {topo.head_links.value}"
            )

    if isinstance(policy, (Asuman, AsumanFrozen, Hierarchical)) and not _finite_nonneg(policy.c_coeff):
        violations.append("sensing coefficient C must be finite and nonnegative")
    if isinstance(policy, Hierarchical) and not (math.isfinite(policy.p_split) and 0 <= policy.p_split <= 1):
        violations.append(f"p_split must lie in [0, 1], got {policy.p_split}")

    return violations


def ensure_valid(spec: NetworkSpec) -> None:
    """Raise :class:`ConfigurationError` listing every violation in ``spec``."""
    violations = validate_spec(spec)
    if violations:
        raise ConfigurationError(violations)
