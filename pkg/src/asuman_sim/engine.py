"""
Exact continuous-time simulation of source updates and gossip.

Every enabled event class is an exponential clock. Rates are piecewise
constant: they only change at a source self-update (a new epoch) or when a
sensing phase ends, so the rate table is rebuilt at those control points and
reused in between. By memorylessness the competing clocks can be redrawn
after every event without biasing the process.

Age integrals are kept lazily. Between events every version is constant, so
``integral(age_i) = integral(N_s) - integral(N_i)`` is updated in O(1) only
when ``N_s`` or ``N_i`` changes.
"""

from __future__ import annotations

import bisect
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import telemetry
from .config import DEFAULT_WARMUP_FRACTION
from .core import ensure_valid, min_age_set
from .metrics import AgeAccumulator
from .types.exceptions import (
    InternalConsistencyError,
    InvalidArgumentError,
    SimulationStalledError,
)
from .types.network import (
    AgeVector,
    Asuman,
    AsumanFrozen,
    HeadPolicy,
    Hierarchical,
    NetworkSpec,
    Topology,
    TopologyKind,
    UniformGossip,
    is_frozen,
    is_opportunistic,
    policy_label,
)
from .types.results import RunStatistics

logger = logging.getLogger(__name__)

# Horizon, in units of 1/lambda, when the source never self-updates.
ZERO_RATE_TIME_BUDGET = 1e4

SOURCE = -1


class Phase(str, Enum):
    SENSING = "sensing"
    GOSSIPING = "gossiping"


class EventKind(str, Enum):
    SELF_UPDATE = "self_update"
    DIRECT = "direct"
    RELAY = "relay"
    GOSSIP = "gossip"
    GOSSIP_START = "gossip_start"


@dataclass(frozen=True)
class Event:
    """One drawn event; ``src`` is :data:`SOURCE` for the source, ``dst`` is -1 when there is no receiver."""

    t: float
    kind: EventKind
    src: int = SOURCE
    dst: int = -1

    def trace_line(self, epoch: int) -> str:
        return f"{self.t:.12g} {self.kind.value} {self.src} {self.dst} {epoch}"


@dataclass(frozen=True)
class SimConfig:
    """A network spec plus horizon, warm-up and seed.

    ``warmup_epochs`` defaults to 20% of ``horizon_epochs``. With
    ``lambda_e == 0`` there are no epochs: the run lasts ``time_budget``
    (default ``1e4 / lambda``) and the warm-up becomes the same fraction of
    that time.
    """

    spec: NetworkSpec
    horizon_epochs: int
    warmup_epochs: Optional[int] = None
    seed: int = 0
    replication: int = 0
    time_budget: Optional[float] = None

    def __post_init__(self) -> None:
        if self.horizon_epochs < 1:
            raise InvalidArgumentError(f"horizon_epochs must be >= 1, got {self.horizon_epochs}")
        if self.warmup_epochs is not None and not 0 <= self.warmup_epochs < self.horizon_epochs:
            raise InvalidArgumentError(
                f"need horizon_epochs > warmup_epochs >= 0, got {self.horizon_epochs} and {self.warmup_epochs}"
            )
        if self.seed < 0:
            raise InvalidArgumentError(f"seed must be nonnegative, got {self.seed}")
        if self.time_budget is not None and not self.time_budget > 0:
            raise InvalidArgumentError(f"time_budget must be positive, got {self.time_budget}")

    @property
    def warmup(self) -> int:
        if self.warmup_epochs is not None:
            return self.warmup_epochs
        return min(int(DEFAULT_WARMUP_FRACTION * self.horizon_epochs), self.horizon_epochs - 1)


# ---------------------------------------------------------------------------
# Random stream
# ---------------------------------------------------------------------------


class RandomStream:
    """Buffered uniform stream owned by one run; exponentials by inverse transform."""

    def __init__(self, seed: int, buffer_size: int = 8192) -> None:
        self._gen = np.random.default_rng(seed)
        self._size = buffer_size
        self._buf = self._gen.random(buffer_size)
        self._pos = 0

    def random(self) -> float:
        if self._pos == self._size:
            self._buf = self._gen.random(self._size)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)

    def exponential(self, rate: float) -> float:
        return -math.log1p(-self.random()) / rate

    def sample(self, population: Sequence[int], k: int) -> Tuple[int, ...]:
        """``k`` distinct items by a partial Fisher-Yates shuffle."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise InvalidArgumentError(f"cannot sample {k} of {len(pool)} items")
        for i in range(k):
            j = i + min(int(self.random() * (len(pool) - i)), len(pool) - i - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return tuple(pool[:k])


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass
class GossipScope:
    """A group of nodes that gossip among themselves under one rule.

    Opportunistic scopes share ``capacity`` among their active set during
    the gossip phase. Uniform scopes let every member send at ``capacity``
    all the time.
    """

    name: str
    members: Tuple[int, ...]
    capacity: float
    opportunistic: bool
    peers: Mapping[int, Tuple[int, ...]] = field(repr=False)
    c_coeff: float = 0.0
    fanout: Optional[int] = None
    frozen: bool = False
    phase: Phase = Phase.GOSSIPING
    active_set: FrozenSet[int] = frozenset()
    min_age: int = 0
    gossip_start: float = 0.0
    frozen_versions: Optional[Dict[int, int]] = field(default=None, repr=False)
    interval_targets: Optional[Dict[int, Tuple[int, ...]]] = field(default=None, repr=False)

    def targets(self, j: int) -> Tuple[int, ...]:
        if self.interval_targets is not None:
            return self.interval_targets.get(j, ())
        return self.peers.get(j, ())

    def version_sent(self, j: int, current: int) -> int:
        if self.frozen_versions is not None:
            return self.frozen_versions[j]
        return current


class _LazyIntegral:
    """``integral(N_s) - integral(N_i)`` maintained over the measurement window."""

    def __init__(self, n: int) -> None:
        self.active = False
        self.start = 0.0
        self._src = 0.0
        self._src_since = 0.0
        self._node = [0.0] * n
        self._node_since = [0.0] * n

    def begin(self, t: float) -> None:
        self.active = True
        self.start = t
        self._src = 0.0
        self._src_since = t
        self._node = [0.0] * len(self._node)
        self._node_since = [t] * len(self._node)

    def source_changing(self, t: float, version: int) -> None:
        if self.active:
            self._src += version * (t - self._src_since)
            self._src_since = t

    def node_changing(self, i: int, t: float, version: int) -> None:
        if self.active:
            self._node[i] += version * (t - self._node_since[i])
            self._node_since[i] = t

    def close(self, t: float, age: AgeVector) -> Tuple[List[float], float]:
        """Flush to ``t``; returns per-node age integrals and the window length."""
        self.source_changing(t, age.source_version)
        for i, v in enumerate(age.node_versions):
            self.node_changing(i, t, v)
        # Ages are nonnegative; clamp rounding noise at zero.
        return [max(self._src - x, 0.0) for x in self._node], t - self.start


@dataclass
class SimState:
    """Mutable state of one run."""

    topology: Topology
    age: AgeVector
    scopes: List[GossipScope]
    scope_of: List[Optional[int]] = field(repr=False)
    direct: Tuple["DirectChannel", ...] = field(repr=False)
    t: float = 0.0
    epoch: int = 0
    epoch_start: float = 0.0
    integral: _LazyIntegral = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.integral is None:
            self.integral = _LazyIntegral(len(self.age))

    def set_version(self, i: int, version: int) -> None:
        self.integral.node_changing(i, self.t, self.age.node_versions[i])
        self.age.node_versions[i] = version

    def next_control(self) -> float:
        pending = [s.gossip_start for s in self.scopes if s.phase is Phase.SENSING]
        return min(pending) if pending else math.inf

    @property
    def phase(self) -> Phase:
        """Gossiping when any opportunistic scope gossips (every scope for flat networks)."""
        opp = [s for s in self.scopes if s.opportunistic]
        if opp and all(s.phase is Phase.SENSING for s in opp):
            return Phase.SENSING
        return Phase.GOSSIPING

    @property
    def active_set(self) -> FrozenSet[int]:
        out: FrozenSet[int] = frozenset()
        for s in self.scopes:
            if s.opportunistic:
                out |= s.active_set
        return out


# ---------------------------------------------------------------------------
# Rate tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectChannel:
    """Constant-rate updates into single receivers; ``origins`` is :data:`SOURCE` for source updates."""

    kind: EventKind
    receivers: Tuple[int, ...]
    rates: Tuple[float, ...]
    origins: Tuple[int, ...]
    cumulative: Tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cumulative", tuple(itertools.accumulate(self.rates)))

    @property
    def total(self) -> float:
        return self.cumulative[-1] if self.cumulative else 0.0

    def pick(self, u: float) -> Tuple[int, int]:
        idx = min(bisect.bisect_right(self.cumulative, u), len(self.receivers) - 1)
        return self.origins[idx], self.receivers[idx]


@dataclass(frozen=True)
class GossipChannel:
    """Senders of one scope, each splitting ``rate_per_sender`` evenly over its targets."""

    scope: int
    senders: Tuple[int, ...]
    rate_per_sender: float
    targets: Tuple[Tuple[int, ...], ...] = field(repr=False)

    @property
    def total(self) -> float:
        return self.rate_per_sender * len(self.senders)

    def link_rate(self, j: int, target: int) -> float:
        try:
            idx = self.senders.index(j)
        except ValueError:
            return 0.0
        outs = self.targets[idx]
        return self.rate_per_sender / len(outs) if target in outs else 0.0

    def pick(self, u: float) -> Tuple[int, int]:
        idx = min(int(u / self.rate_per_sender), len(self.senders) - 1)
        outs = self.targets[idx]
        share = self.rate_per_sender / len(outs)
        residual = u - idx * self.rate_per_sender
        return self.senders[idx], outs[min(int(residual / share), len(outs) - 1)]


@dataclass(frozen=True)
class RateTable:
    self_update: float
    direct: Tuple[DirectChannel, ...]
    gossip: Tuple[GossipChannel, ...]

    @property
    def direct_total(self) -> float:
        return sum(ch.total for ch in self.direct)

    @property
    def total_gossip(self) -> float:
        return sum(ch.total for ch in self.gossip)

    @property
    def total(self) -> float:
        return self.self_update + self.direct_total + self.total_gossip

    def gossip_rate(self, j: int, target: int) -> float:
        return sum(ch.link_rate(j, target) for ch in self.gossip)


def event_rates(state: SimState, spec: NetworkSpec) -> RateTable:
    """Instantaneous rate of every enabled event class in ``state``."""
    channels: List[GossipChannel] = []
    for idx, scope in enumerate(state.scopes):
        if scope.opportunistic:
            if scope.phase is Phase.SENSING or not scope.active_set:
                continue
            rate = scope.capacity / len(scope.active_set)
            senders = sorted(scope.active_set)
        else:
            rate = scope.capacity
            senders = list(scope.members)
        senders = [j for j in senders if scope.targets(j)]
        if senders and rate > 0:
            channels.append(GossipChannel(idx, tuple(senders), rate, tuple(scope.targets(j) for j in senders)))
    return RateTable(self_update=spec.rates.lambda_e, direct=state.direct, gossip=tuple(channels))


def _direct_channels(spec: NetworkSpec) -> Tuple[DirectChannel, ...]:
    topo = spec.topology
    pairs = [(i, r) for i, r in enumerate(spec.profile) if r > 0]
    channels = []
    if pairs:
        channels.append(
            DirectChannel(
                EventKind.DIRECT,
                tuple(i for i, _ in pairs),
                tuple(r for _, r in pairs),
                tuple(SOURCE for _ in pairs),
            )
        )
    policy = spec.policy
    if isinstance(policy, Hierarchical) and topo.clusters:
        m = topo.leaves_per_cluster or 0
        per_leaf = policy.effective_p * spec.rates.lambda_total / m
        receivers, origins = [], []
        for k in range(topo.clusters):
            head = topo.head_of_cluster(k)
            for leaf in topo.cluster_leaves(k):
                receivers.append(leaf)
                origins.append(head)
        if per_leaf > 0:
            channels.append(
                DirectChannel(EventKind.RELAY, tuple(receivers), tuple([per_leaf] * len(receivers)), tuple(origins))
            )
    return tuple(channels)


def _build_scopes(spec: NetworkSpec) -> List[GossipScope]:
    topo, policy, lam = spec.topology, spec.policy, spec.rates.lambda_total
    n = topo.n
    nodes = tuple(range(n))

    if isinstance(policy, UniformGossip):
        per_node = spec.rates.gossip_capacity / n
        peers = {i: topo.neighbors(i) for i in nodes}
        return [GossipScope("network", nodes, per_node, opportunistic=False, peers=peers)]

    if isinstance(policy, (Asuman, AsumanFrozen)):
        fanout = None
        if topo.kind is TopologyKind.PARTIAL and topo.q is not None:
            fanout = math.floor(topo.q * (n - 1))
        peers = {i: topo.neighbors(i) for i in nodes}
        return [
            GossipScope(
                "network",
                nodes,
                spec.rates.gossip_capacity,
                opportunistic=True,
                peers=peers,
                c_coeff=policy.c_coeff,
                fanout=fanout,
                frozen=is_frozen(policy),
            )
        ]

    assert isinstance(policy, Hierarchical)
    c, m = topo.clusters or 0, topo.leaves_per_cluster or 0
    scopes = []
    for k in range(c):
        leaves = topo.cluster_leaves(k)
        scopes.append(
            GossipScope(
                f"cluster-{k}",
                leaves,
                m * lam,
                opportunistic=True,
                peers={i: tuple(j for j in leaves if j != i) for i in leaves},
                c_coeff=policy.c_coeff,
                frozen=policy.frozen,
            )
        )
    heads = topo.heads
    head_peers = {h: tuple(j for j in topo.neighbors(h) if topo.is_head(j)) for h in heads}
    share = 1.0 - policy.effective_p
    if policy.head_policy is HeadPolicy.FULL_ASUMAN:
        scopes.append(
            GossipScope(
                "heads",
                heads,
                c * share * lam,
                opportunistic=True,
                peers=head_peers,
                c_coeff=policy.c_coeff,
                frozen=policy.frozen,
            )
        )
    elif policy.head_policy is HeadPolicy.RING:
        scopes.append(GossipScope("heads", heads, share * lam, opportunistic=False, peers=head_peers))
    return scopes


def initial_state(spec: NetworkSpec, rng: RandomStream) -> SimState:
    """All versions 0; every scope gossiping with all of its members active."""
    n = spec.n
    scopes = _build_scopes(spec)
    scope_of: List[Optional[int]] = [None] * n
    for idx, scope in enumerate(scopes):
        for i in scope.members:
            scope_of[i] = idx
        if scope.opportunistic:
            scope.active_set = frozenset(scope.members)
            if scope.frozen:
                scope.frozen_versions = {i: 0 for i in scope.members}
            if scope.fanout is not None:
                scope.interval_targets = _draw_targets(scope, rng)
    return SimState(
        topology=spec.topology,
        age=AgeVector.zeros(n),
        scopes=scopes,
        scope_of=scope_of,
        direct=_direct_channels(spec),
    )


def _draw_targets(scope: GossipScope, rng: RandomStream) -> Dict[int, Tuple[int, ...]]:
    k = scope.fanout or 0
    return {j: rng.sample(scope.peers[j], k) for j in sorted(scope.active_set)}


# ---------------------------------------------------------------------------
# Transitions
# ---------------------------------------------------------------------------


def on_source_self_update(state: SimState, rng: RandomStream) -> SimState:
    """New epoch: every age grows by one and each opportunistic scope re-senses its minimum-age set."""
    state.integral.source_changing(state.t, state.age.source_version)
    state.age.source_version += 1
    state.epoch += 1
    state.epoch_start = state.t

    versions = state.age.node_versions
    for scope in state.scopes:
        if not scope.opportunistic:
            continue
        scope.active_set, scope.min_age = min_age_set(state.age, scope.members)
        if scope.frozen:
            scope.frozen_versions = {j: versions[j] for j in scope.active_set}
        if scope.fanout is not None:
            scope.interval_targets = _draw_targets(scope, rng)
        delay = scope.c_coeff * scope.min_age
        scope.gossip_start = state.t + delay
        scope.phase = Phase.SENSING if delay > 0 else Phase.GOSSIPING
    return state


def on_gossip_start(state: SimState) -> SimState:
    for scope in state.scopes:
        if scope.phase is Phase.SENSING and scope.gossip_start <= state.t:
            scope.phase = Phase.GOSSIPING
    return state


def on_direct_update(state: SimState, i: int, origin: int = SOURCE) -> SimState:
    """Source update sets node ``i`` to the source version; a relay never lowers it."""
    versions = state.age.node_versions
    if origin == SOURCE:
        new = state.age.source_version
    else:
        new = max(versions[i], versions[origin])
    if new != versions[i]:
        state.set_version(i, new)
    return state


def on_gossip(state: SimState, j: int, target: int) -> SimState:
    """``target`` keeps the fresher of its own version and the one ``j`` sends."""
    idx = state.scope_of[j]
    if idx is None:
        raise InternalConsistencyError(f"node {j} belongs to no gossip scope")
    scope = state.scopes[idx]
    if scope.opportunistic:
        if scope.phase is Phase.SENSING:
            raise InternalConsistencyError(f"gossip from {j} at t={state.t} during sensing")
        if j not in scope.active_set:
            raise InternalConsistencyError(f"gossip from {j} which is not in the minimum-age set")
    versions = state.age.node_versions
    sent = scope.version_sent(j, versions[j])
    if sent > versions[target]:
        state.set_version(target, sent)
    return state


def next_event(state: SimState, table: RateTable, rng: RandomStream) -> Event:
    """Draw the next event from the competing clocks, or the pending control point if it comes first."""
    total = table.total
    pending = state.next_control()
    if total <= 0:
        if math.isinf(pending):
            raise SimulationStalledError(state.t)
        return Event(pending, EventKind.GOSSIP_START)

    t_next = state.t + rng.exponential(total)
    if t_next >= pending:
        return Event(pending, EventKind.GOSSIP_START)

    u = rng.random() * total
    if u < table.self_update:
        return Event(t_next, EventKind.SELF_UPDATE)
    u -= table.self_update
    for ch in table.direct:
        if u < ch.total:
            origin, dst = ch.pick(u)
            return Event(t_next, ch.kind, origin, dst)
        u -= ch.total
    for gch in table.gossip:
        if u < gch.total:
            src, dst = gch.pick(u)
            return Event(t_next, EventKind.GOSSIP, src, dst)
        u -= gch.total
    # Rounding left u at the very top of the range.
    last = table.gossip[-1] if table.gossip else None
    if last is not None:
        src, dst = last.pick(last.total * (1 - 1e-12))
        return Event(t_next, EventKind.GOSSIP, src, dst)
    if table.direct:
        ch = table.direct[-1]
        origin, dst = ch.pick(ch.total)
        return Event(t_next, ch.kind, origin, dst)
    return Event(t_next, EventKind.SELF_UPDATE)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

TraceSink = Callable[[str], None]
Observer = Callable[[Event, SimState], None]


def _count_not_min(state: SimState, counts: List[int]) -> None:
    for scope in state.scopes:
        if scope.opportunistic:
            for i in scope.members:
                if i not in scope.active_set:
                    counts[i] += 1


def simulate(
    config: SimConfig,
    *,
    trace: Optional[TraceSink] = None,
    observer: Optional[Observer] = None,
) -> RunStatistics:
    """Run one replication and return its time-averaged ages.

    ``trace`` receives one ``"t kind src dst k"`` line per event and
    ``observer`` is called with every event and the state after it.
    Raises :class:`~asuman_sim.types.exceptions.ConfigurationError` before
    any event when the spec is invalid.
    """
    spec = config.spec
    ensure_valid(spec)
    attributes = {
        telemetry.ATTR_SPEC_KEY: spec.key(),
        telemetry.ATTR_SEED: config.seed,
        telemetry.ATTR_REPLICATION: config.replication,
        telemetry.ATTR_POLICY: policy_label(spec.policy),
        telemetry.ATTR_NODES: spec.n,
        telemetry.ATTR_EPOCHS: config.horizon_epochs,
    }
    with telemetry.trace("asuman_sim.simulate", attributes=attributes) as span:
        stats = _run(config, trace, observer)
        telemetry.set_attributes(span, {telemetry.ATTR_EVENTS: sum(stats.event_counts.values())})
    return stats


def _run(config: SimConfig, trace: Optional[TraceSink], observer: Optional[Observer]) -> RunStatistics:
    spec = config.spec
    rng = RandomStream(config.seed)
    state = initial_state(spec, rng)
    n = spec.n
    acc = AgeAccumulator(n)
    horizon, warmup = config.horizon_epochs, config.warmup
    lam_e = spec.rates.lambda_e
    opportunistic = is_opportunistic(spec.policy)
    not_min = [0] * n
    sensing_members = {i for s in state.scopes if s.opportunistic for i in s.members}
    measured_epochs = 0

    timed = lam_e == 0
    t_end = math.inf
    t_measure = 0.0
    if timed:
        t_end = config.time_budget or ZERO_RATE_TIME_BUDGET / spec.rates.lambda_total
        t_measure = t_end * warmup / horizon
    if warmup == 0 or (timed and t_measure == 0):
        state.integral.begin(0.0)

    started = time.perf_counter()
    logger.debug(
        "simulate start: spec=%s n=%d seed=%d epochs=%d warmup=%d", spec.key(), n, config.seed, horizon, warmup
    )

    table = event_rates(state, spec)
    while True:
        ev = next_event(state, table, rng)
        if timed:
            if not state.integral.active and ev.t >= t_measure:
                state.integral.begin(t_measure)
            if ev.t >= t_end:
                state.t = t_end
                break
        if ev.kind is EventKind.SELF_UPDATE and state.epoch + 1 == horizon:
            state.t = ev.t
            break

        state.t = ev.t
        if ev.kind is EventKind.SELF_UPDATE:
            on_source_self_update(state, rng)
            acc.record_min_age(min_age_set(state.age, range(n))[1])
            if state.epoch == warmup:
                state.integral.begin(state.t)
            if state.integral.active and opportunistic:
                measured_epochs += 1
                _count_not_min(state, not_min)
            table = event_rates(state, spec)
        elif ev.kind is EventKind.GOSSIP_START:
            on_gossip_start(state)
            table = event_rates(state, spec)
        elif ev.kind is EventKind.GOSSIP:
            on_gossip(state, ev.src, ev.dst)
        else:
            on_direct_update(state, ev.dst, ev.src)

        acc.event_counts[ev.kind.value] += 1
        if trace is not None:
            trace(ev.trace_line(state.epoch))
        if observer is not None:
            observer(ev, state)

    integrals, window = state.integral.close(state.t, state.age)
    acc.add_integrals(integrals, window)

    not_min_fraction = None
    if opportunistic:
        not_min_fraction = [
            (not_min[i] / measured_epochs if measured_epochs else math.nan) if i in sensing_members else math.nan
            for i in range(n)
        ]
    stats = acc.finalize(
        replication=config.replication,
        seed=config.seed,
        spec_key=spec.key(),
        epochs=horizon,
        not_min_fraction=not_min_fraction,
    )
    logger.debug(
        "simulate done: policy=%s seed=%d mean=%.6g events=%s wall=%.3fs",
        policy_label(spec.policy),
        config.seed,
        stats.network_mean,
        dict(acc.event_counts),
        time.perf_counter() - started,
    )
    return stats
