"""
Shared test utilities for asuman-sim.

Constants and spec factories for unit tests. Import as
``from tests.utils import ...``.

Fixtures stay in :file:`tests/conftest.py`; do not import ``conftest``.
"""

from __future__ import annotations

import os
import sys

# ---------------------------------------------------------------------------
# Ensure ``src/`` is importable when running pytest without an editable install
# ---------------------------------------------------------------------------

_SRC = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
if _SRC not in sys.path:
    sys.path.insert(0, _SRC)

from asuman_sim.topology import (  # noqa: E402
    build_clustered,
    build_complete,
    build_ring,
    rate_profile_clustered,
    rate_profile_uniform,
)
from asuman_sim.types import (  # noqa: E402
    Asuman,
    HeadLinks,
    HeadPolicy,
    Hierarchical,
    NetworkSpec,
    Rates,
    UniformGossip,
)

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

TEST_SEED = 20240611
REL = 1e-9


# ---------------------------------------------------------------------------
# Spec factories
# ---------------------------------------------------------------------------


def make_spec(topology, policy=None, *, lambda_e=1.0, lam=1.0, capacity=None, profile=None):
    """Build a NetworkSpec with the usual defaults (B = n lambda, C = 1/n, uniform profile)."""
    n = topology.n
    if policy is None:
        policy = Asuman(1.0 / n)
    if profile is None:
        profile = rate_profile_clustered(lam, topology) if topology.is_clustered else rate_profile_uniform(lam, n)
    return NetworkSpec(
        topology=topology,
        rates=Rates(lambda_e=lambda_e, lambda_total=lam, gossip_capacity=n * lam if capacity is None else capacity),
        profile=profile,
        policy=policy,
    )


def complete_spec(n, policy=None, **kwargs):
    return make_spec(build_complete(n), policy, **kwargs)


def uniform_spec(n, **kwargs):
    return make_spec(build_complete(n), UniformGossip(), **kwargs)


def ring_spec(n, policy=None, **kwargs):
    return make_spec(build_ring(n), policy, **kwargs)


def clustered_spec(c, m, head_links=HeadLinks.COMPLETE, *, p=0.5, frozen=False, **kwargs):
    topo = build_clustered(c, m, head_links)
    head_policy = {
        HeadLinks.NONE: HeadPolicy.DISCONNECTED,
        HeadLinks.RING: HeadPolicy.RING,
        HeadLinks.COMPLETE: HeadPolicy.FULL_ASUMAN,
    }[head_links]
    policy = Hierarchical(p_split=p, head_policy=head_policy, c_coeff=1.0 / topo.n, frozen=frozen)
    return make_spec(topo, policy, **kwargs)


def scenario_doc(kind="complete", n=6, policy="asuman", epochs=60, replications=3, seed=TEST_SEED, **topology):
    """Minimal scenario document; extra keyword arguments go into ``topology``."""
    topo = {"kind": kind, "n": n}
    topo.update(topology)
    return {
        "topology": topo,
        "policy": {"kind": policy},
        "run": {"epochs": epochs, "replications": replications, "seed": seed},
    }
