"""
Builders for the supported network families and for source-rate profiles.

Graphs are assembled with networkx and frozen into sorted adjacency tuples,
so a built :class:`~asuman_sim.types.network.Topology` is immutable and can
be shared between threads and pickled into worker processes.
"""

from __future__ import annotations

import logging
import math
from typing import Hashable, Mapping, Optional

import networkx as nx
import numpy as np

from .types.exceptions import InvalidArgumentError
from .types.network import HeadLinks, RateProfile, Topology, TopologyKind

logger = logging.getLogger(__name__)


def _freeze(graph: nx.Graph, order: Optional[Mapping[Hashable, int]] = None) -> tuple:
    """Sorted, irreflexive adjacency tuples indexed by node position."""
    if order is None:
        order = {node: node for node in graph.nodes}
    adjacency = [()] * graph.number_of_nodes()
    for node, idx in order.items():
        adjacency[idx] = tuple(sorted(order[nbr] for nbr in graph.neighbors(node) if nbr != node))
    return tuple(adjacency)


def build_complete(n: int) -> Topology:
    if n < 1:
        raise InvalidArgumentError(f"complete topology needs n >= 1, got {n}")
    return Topology(n=n, kind=TopologyKind.COMPLETE, adjacency=_freeze(nx.complete_graph(n)))


def build_partial(n: int, q: float) -> Topology:
    """Complete adjacency plus the fraction ``q`` of peers reachable per epoch."""
    if n < 1:
        raise InvalidArgumentError(f"partial topology needs n >= 1, got {n}")
    if not (math.isfinite(q) and 0 < q <= 1):
        raise InvalidArgumentError(f"partial topology needs q in (0, 1], got {q}")
    return Topology(n=n, kind=TopologyKind.PARTIAL, adjacency=_freeze(nx.complete_graph(n)), q=q)


def build_ring(n: int) -> Topology:
    if n < 3:
        raise InvalidArgumentError(f"ring topology needs n >= 3, got {n}")
    return Topology(n=n, kind=TopologyKind.RING, adjacency=_freeze(nx.cycle_graph(n)))


def build_grid(rows: int, cols: int, wrap: bool = True) -> Topology:
    """Row-major grid; ``wrap`` makes it a torus with every degree equal to 4."""
    smallest = 3 if wrap else 1
    if rows < smallest or cols < smallest:
        raise InvalidArgumentError(f"grid with wrap={wrap} needs rows, cols >= {smallest}, got {rows}x{cols}")
    graph = nx.grid_2d_graph(rows, cols, periodic=wrap)
    order = {(r, c): r * cols + c for r, c in graph.nodes}
    return Topology(
        n=rows * cols,
        kind=TopologyKind.GRID,
        adjacency=_freeze(graph, order),
        rows=rows,
        cols=cols,
        wrap=wrap,
    )


def build_clustered(c: int, m: int, head_links: HeadLinks = HeadLinks.COMPLETE) -> Topology:
    """``c`` clusters of ``m`` leaves plus one head each; ``c * (m + 1)`` nodes in total.

    Cluster ``k`` occupies indices ``[k (m+1), (k+1)(m+1))`` with the head last.
    """
    head_links = HeadLinks(head_links)
    if c < 1 or m < 2:
        raise InvalidArgumentError(f"clustered topology needs c >= 1 and m >= 2, got c={c}, m={m}")
    if head_links is HeadLinks.RING and c < 3:
        raise InvalidArgumentError(f"ring-connected heads need c >= 3, got c={c}")

    block = m + 1
    graph = nx.Graph()
    for k in range(c):
        members = range(k * block, (k + 1) * block)
        graph.add_edges_from(nx.complete_graph(members).edges)
    heads = [k * block + m for k in range(c)]
    if head_links is HeadLinks.RING:
        nx.add_cycle(graph, heads)
    elif head_links is HeadLinks.COMPLETE:
        graph.add_edges_from(nx.complete_graph(heads).edges)

    return Topology(
        n=c * block,
        kind=TopologyKind.CLUSTERED,
        adjacency=_freeze(graph),
        clusters=c,
        leaves_per_cluster=m,
        head_links=head_links,
    )


# ---------------------------------------------------------------------------
# Source-rate profiles
# ---------------------------------------------------------------------------


def rate_profile_uniform(lam: float, n: int) -> RateProfile:
    if not lam > 0 or n < 1:
        raise InvalidArgumentError(f"uniform profile needs lambda > 0 and n >= 1, got lambda={lam}, n={n}")
    return RateProfile(tuple([lam / n] * n))


def rate_profile_power_law(lam: float, nu: float, n: int) -> RateProfile:
    """``lambda_i = theta nu^i`` for ``i = 1..n``, normalized so the rates sum to ``lam``.

    ``nu == 1`` is the uniform profile.
    """
    if not (math.isfinite(nu) and 0 < nu <= 1):
        raise InvalidArgumentError(f"power-law exponent needs 0 < nu <= 1, got {nu}")
    if nu == 1:
        return rate_profile_uniform(lam, n)
    if not lam > 0 or n < 1:
        raise InvalidArgumentError(f"power-law profile needs lambda > 0 and n >= 1, got lambda={lam}, n={n}")
    i = np.arange(1, n + 1, dtype=float)
    shares = np.power(nu, i) * (1.0 - nu) / (nu * (1.0 - nu**n))
    return RateProfile(tuple(float(x) for x in lam * shares))


def rate_profile_clustered(lam: float, topology: Topology) -> RateProfile:
    """The source feeds only cluster heads, at ``lam / c`` each."""
    if not topology.is_clustered or not topology.clusters:
        raise InvalidArgumentError("clustered profile requires a clustered topology")
    if not lam > 0:
        raise InvalidArgumentError(f"clustered profile needs lambda > 0, got {lam}")
    rates = [0.0] * topology.n
    for head in topology.heads:
        rates[head] = lam / topology.clusters
    return RateProfile(tuple(rates))
