"""
Type definitions for gossip network specifications.

Rates, source-to-node rate profiles, the version/age vector, topologies and
gossip policies. Versions are plain Python ints, so at the rates and horizons
the simulator targets they cannot overflow and are never checked per event.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, ClassVar, Dict, Iterator, List, Optional, Tuple, Union

from .exceptions import InvalidArgumentError

# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class TopologyKind(str, Enum):
    """Network families supported by the topology builders."""

    COMPLETE = "complete"
    PARTIAL = "partial"
    RING = "ring"
    GRID = "grid"
    CLUSTERED = "clustered"


class HeadLinks(str, Enum):
    """How cluster heads are wired to each other."""

    NONE = "none"
    RING = "ring"
    COMPLETE = "complete"


class HeadPolicy(str, Enum):
    """How cluster heads share updates among themselves."""

    DISCONNECTED = "disconnected"
    RING = "ring"
    FULL_ASUMAN = "full_asuman"


HEAD_POLICY_FOR_LINKS = {
    HeadLinks.NONE: HeadPolicy.DISCONNECTED,
    HeadLinks.RING: HeadPolicy.RING,
    HeadLinks.COMPLETE: HeadPolicy.FULL_ASUMAN,
}


# ---------------------------------------------------------------------------
# Rates and profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rates:
    """Source self-update rate, total source-to-network rate and gossip capacity.

    ``gossip_capacity`` (B) defaults to ``n * lambda_total`` when built through
    :func:`asuman_sim.scenario.parse_scenario`; it is not forced to that value.
    """

    lambda_e: float
    lambda_total: float
    gossip_capacity: float


@dataclass(frozen=True)
class RateProfile:
    """Per-node source-to-node rates; entry ``i`` is the rate of source -> node ``i``."""

    per_node_rates: Tuple[float, ...]

    @property
    def total(self) -> float:
        return float(sum(self.per_node_rates))

    def __len__(self) -> int:
        return len(self.per_node_rates)

    def __iter__(self) -> Iterator[float]:
        return iter(self.per_node_rates)


@dataclass
class AgeVector:
    """Source version plus per-node versions; ages are derived, never stored.

    ``ages[i] == source_version - node_versions[i]`` therefore holds by
    construction.
    """

    source_version: int = 0
    node_versions: List[int] = field(default_factory=list)

    @classmethod
    def zeros(cls, n: int) -> "AgeVector":
        return cls(source_version=0, node_versions=[0] * n)

    @property
    def ages(self) -> List[int]:
        s = self.source_version
        return [s - v for v in self.node_versions]

    def age(self, i: int) -> int:
        return self.source_version - self.node_versions[i]

    def copy(self) -> "AgeVector":
        return AgeVector(self.source_version, list(self.node_versions))

    def __len__(self) -> int:
        return len(self.node_versions)


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformGossip:
    """Baseline: every node always gossips, splitting its rate over its neighbours."""

    name: ClassVar[str] = "uniform"


@dataclass(frozen=True)
class Asuman:
    """Opportunistic gossip: only minimum-age nodes transmit, after a sensing wait of ``C * min_age``."""

    c_coeff: float
    name: ClassVar[str] = "asuman"


@dataclass(frozen=True)
class AsumanFrozen:
    """ASUMAN variant where active nodes only forward the version they held at epoch start."""

    c_coeff: float
    name: ClassVar[str] = "asuman_frozen"


@dataclass(frozen=True)
class Hierarchical:
    """Clustered gossip: leaves run ASUMAN per cluster, heads relay and gossip among themselves.

    ``p_split`` is the share of the head's rate used to refresh its leaves;
    the rest is spent gossiping with other heads. Disconnected heads have
    nothing to gossip with, so their effective split is always 1.
    """

    p_split: float
    head_policy: HeadPolicy
    c_coeff: float
    frozen: bool = False
    name: ClassVar[str] = "hierarchical"

    @property
    def effective_p(self) -> float:
        if self.head_policy is HeadPolicy.DISCONNECTED:
            return 1.0
        return self.p_split


PolicyKind = Union[UniformGossip, Asuman, AsumanFrozen, Hierarchical]


def policy_label(policy: PolicyKind) -> str:
    """Short label used in CSV output and span attributes."""
    if isinstance(policy, Hierarchical):
        return f"{policy.name}_{policy.head_policy.value}"
    return policy.name


def is_opportunistic(policy: PolicyKind) -> bool:
    return not isinstance(policy, UniformGossip)


def is_frozen(policy: PolicyKind) -> bool:
    return isinstance(policy, AsumanFrozen) or (isinstance(policy, Hierarchical) and policy.frozen)


# ---------------------------------------------------------------------------
# Topology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Topology:
    """Static network structure.

    For ``PARTIAL`` the adjacency is the complete graph; the engine redraws
    ``floor(q (n - 1))`` targets per gossiping node every epoch. Clustered
    networks lay out each cluster as a contiguous block of ``m`` leaves
    followed by its head.
    """

    n: int
    kind: TopologyKind
    adjacency: Tuple[Tuple[int, ...], ...] = field(repr=False)
    q: Optional[float] = None
    rows: Optional[int] = None
    cols: Optional[int] = None
    wrap: bool = True
    clusters: Optional[int] = None
    leaves_per_cluster: Optional[int] = None
    head_links: Optional[HeadLinks] = None

    def neighbors(self, i: int) -> Tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    # -- Clustered helpers -------------------------------------------------

    @property
    def is_clustered(self) -> bool:
        return self.kind is TopologyKind.CLUSTERED

    def _block(self) -> int:
        if not self.is_clustered or self.leaves_per_cluster is None:
            raise InvalidArgumentError(f"{self.kind.value} topology has no clusters")
        return self.leaves_per_cluster + 1

    def head_of_cluster(self, k: int) -> int:
        block = self._block()
        return k * block + block - 1

    def cluster_leaves(self, k: int) -> Tuple[int, ...]:
        block = self._block()
        return tuple(range(k * block, k * block + block - 1))

    def cluster_of(self, i: int) -> int:
        return i // self._block()

    def is_head(self, i: int) -> bool:
        return self.is_clustered and i % self._block() == self._block() - 1

    @property
    def heads(self) -> Tuple[int, ...]:
        return tuple(self.head_of_cluster(k) for k in range(self.clusters or 0))

    # -- Export ------------------------------------------------------------

    def to_adjacency_text(self) -> str:
        """One line per node: ``"i: j k l"``."""
        lines = []
        for i, nbrs in enumerate(self.adjacency):
            lines.append(f"{i}: {' '.join(str(j) for j in nbrs)}".rstrip())
        return "\n".join(lines) + "\n"

    def describe(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "n": self.n}
        if self.kind is TopologyKind.PARTIAL:
            data["q"] = self.q
        elif self.kind is TopologyKind.GRID:
            data.update(rows=self.rows, cols=self.cols, wrap=self.wrap)
        elif self.kind is TopologyKind.CLUSTERED:
            data.update(
                c=self.clusters,
                m=self.leaves_per_cluster,
                head_links=self.head_links.value if self.head_links else None,
            )
        return data


# ---------------------------------------------------------------------------
# Network spec
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NetworkSpec:
    """Everything a run needs except horizon and seed."""

    topology: Topology
    rates: Rates
    profile: RateProfile
    policy: PolicyKind

    @property
    def n(self) -> int:
        return self.topology.n

    def describe(self) -> Dict[str, Any]:
        policy = asdict(self.policy)
        policy = {k: (v.value if isinstance(v, Enum) else v) for k, v in policy.items()}
        policy["kind"] = self.policy.name
        return {
            "topology": self.topology.describe(),
            "rates": asdict(self.rates),
            "profile": [repr(float(r)) for r in self.profile.per_node_rates],
            "policy": policy,
        }

    def summary(self) -> str:
        """One-line rendering for log records and status lines, e.g. ``ring n=8 policy=asuman lambda_e=1 ...``."""
        topology = self.topology.describe()
        parts = [str(topology.pop("kind"))]
        parts.extend(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in topology.items())
        parts.append(f"policy={policy_label(self.policy)}")
        rates = self.rates
        parts.append(f"lambda_e={rates.lambda_e:g} lambda={rates.lambda_total:g} B={rates.gossip_capacity:g}")
        return " ".join(parts)

    def key(self) -> str:
        """Stable digest of every parameter; equal specs give equal keys across processes."""
        payload = json.dumps(self.describe(), sort_keys=True, default=str)
        return hashlib.blake2b(payload.encode("utf-8"), digest_size=12).hexdigest()
