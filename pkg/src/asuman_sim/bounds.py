"""
Closed-form age bounds and Monte-Carlo evaluators of the bounding recurrences.

Every closed form here is a pure function of its arguments, so the module
doubles as the oracle for simulation tests. Formulas that carry a
``1 / lambda_e`` factor are multiplied out, which keeps them finite at
``lambda_e == 0``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import telemetry
from .types.exceptions import InvalidArgumentError
from .types.results import BoundKind, BoundReport, RecurrenceEstimate

logger = logging.getLogger(__name__)


def _check_rates(lam_e: float, lam: float) -> None:
    if not (math.isfinite(lam_e) and lam_e >= 0):
        raise InvalidArgumentError(f"lambda_e must be finite and nonnegative, got {lam_e}")
    if not (math.isfinite(lam) and lam > 0):
        raise InvalidArgumentError(f"lambda must be finite and positive, got {lam}")


def _check_open_p(p: float) -> None:
    if not 0 < p < 1:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p}")


def _ratio(lam_e: float, lam: float) -> float:
    return lam_e / (lam_e + lam)


# ---------------------------------------------------------------------------
# Minimum age and fully connected networks
# ---------------------------------------------------------------------------


def min_age_mean(k: int, lam_e: float, lam: float) -> float:
    """Mean minimum age at the start of epoch ``k``: a geometric sum of ``k`` terms."""
    _check_rates(lam_e, lam)
    if k < 0:
        raise InvalidArgumentError(f"k must be nonnegative, got {k}")
    r = _ratio(lam_e, lam)
    return (1.0 - r**k) / (1.0 - r)


def min_age_series(k_max: int, lam_e: float, lam: float) -> np.ndarray:
    """``min_age_mean(k)`` for ``k = 0..k_max`` through ``a[k+1] = 1 + r a[k]``."""
    _check_rates(lam_e, lam)
    if k_max < 0:
        raise InvalidArgumentError(f"k_max must be nonnegative, got {k_max}")
    r = _ratio(lam_e, lam)
    out = np.zeros(k_max + 1)
    for k in range(1, k_max + 1):
        out[k] = 1.0 + r * out[k - 1]
    return out


def min_age_limit(lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    return (lam_e + lam) / lam


def single_node_age(lam_e: float, lam: float) -> float:
    """Exact mean age of a lone node: +1 at rate ``lam_e``, reset at rate ``lam``."""
    _check_rates(lam_e, lam)
    return lam_e / lam


def asuman_ub(n: int, gossip_capacity: float, lam_e: float, lam: float) -> float:
    """Finite-n upper bound on the average age of a fully connected network."""
    _check_rates(lam_e, lam)
    if n < 2:
        raise InvalidArgumentError(f"asuman bound needs n >= 2, got {n}")
    if not gossip_capacity > 0:
        raise InvalidArgumentError(f"gossip capacity must be positive, got {gossip_capacity}")
    per_link = gossip_capacity / (n - 1)
    return (lam_e + per_link * (lam_e + lam) / lam) / (lam / n + per_link)


def asuman_ub_limit(lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    return 2.0 * lam_e / lam + 1.0


def sensing_bound_b(k: int, lam_e: float, lam: float) -> float:
    """Bound on the mean age during sensing phases at epoch ``k``."""
    _check_rates(lam_e, lam)
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    r = _ratio(lam_e, lam)
    return 2.0 * sum(r**ell for ell in range(k - 1)) + r ** (k - 1)


def sensing_bound_limit(lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    return 2.0 * (lam_e / lam + 1.0)


# ---------------------------------------------------------------------------
# Partial connectivity and the frozen-mode not-minimum probability
# ---------------------------------------------------------------------------


def _check_q(q: float) -> None:
    if not (math.isfinite(q) and 0 < q <= 1):
        raise InvalidArgumentError(f"q must lie in (0, 1], got {q}")


def partial_pi_tilde(q: float, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    _check_q(q)
    return q * lam**2 / ((lam_e + 2 * lam) * (lam + q * lam_e))


def partial_ub(q: float, lam_e: float, lam: float) -> float:
    return 1.0 + lam_e / lam + 1.0 / partial_pi_tilde(q, lam_e, lam)


def not_min_alpha_mean(n: int, lam_e: float, lam: float) -> float:
    """Mean sojourn, in epochs, outside the minimum-age set."""
    _check_rates(lam_e, lam)
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    return lam_e * (lam - lam / n) / ((lam_e + lam / n) * (lam_e + lam))


def stationary_not_min_prob(mean_alpha: float, mean_gamma: float) -> float:
    """Stationary share of the "not minimum" state of a two-state alternating chain."""
    if mean_alpha < 0 or mean_gamma < 0 or mean_alpha + mean_gamma == 0:
        raise InvalidArgumentError("sojourn means must be nonnegative and not both zero")
    return mean_alpha / (mean_alpha + mean_gamma)


def lemma3_not_min_prob_lb(n: int, lam_e: float, lam: float) -> float:
    """Lower bound on the stationary probability that a node is outside the minimum-age set."""
    _check_rates(lam_e, lam)
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    return lam_e * (lam - lam / n) / (lam_e**2 + 2 * lam_e * lam + lam**2 / n)


# ---------------------------------------------------------------------------
# Finite-degree networks
# ---------------------------------------------------------------------------


def finite_degree_lb(n: int, degree: int, lam_e: float, lam: float) -> float:
    """Lower bound ``n lam_e / ((d + 1) lam)`` for a symmetric network of constant degree ``d``."""
    _check_rates(lam_e, lam)
    if degree < 1 or n < degree + 1:
        raise InvalidArgumentError(f"need degree >= 1 and n >= degree + 1, got n={n}, degree={degree}")
    return n * lam_e / ((degree + 1) * lam)


def ring_lb(n: int, lam_e: float, lam: float) -> float:
    if n < 3:
        raise InvalidArgumentError(f"ring bound needs n >= 3, got {n}")
    return finite_degree_lb(n, 2, lam_e, lam)


# ---------------------------------------------------------------------------
# Clustered networks
# ---------------------------------------------------------------------------


def cluster_head_ub(c: int, p: float, lam_e: float, lam: float) -> float:
    """Upper bound on head age when the heads run ASUMAN among themselves."""
    _check_rates(lam_e, lam)
    _check_open_p(p)
    if c < 2:
        raise InvalidArgumentError(f"head bound needs c >= 2, got {c}")
    head_rate = c * (1 - p) * lam / (c - 1)
    numerator = lam_e / lam + head_rate * (lam_e / lam**2 + 1.0 / lam)
    return numerator / (1.0 / c + c * (1 - p) / (c - 1))


def cluster_head_limit(p: float, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    _check_open_p(p)
    return (1 + 1 / (1 - p)) * lam_e / lam + 1


def cluster_min_age_limit(p: float, lam_e: float, lam: float, a1: float) -> float:
    """Limit of the cluster minimum age given mean head age ``a1``."""
    _check_rates(lam_e, lam)
    if not 0 < p <= 1:
        raise InvalidArgumentError(f"p must lie in (0, 1], got {p}")
    return lam_e / (p * lam) + a1 + 1


def cluster_leaf_ub(m: int, p: float, lam_e: float, lam: float, a1: float) -> float:
    """Finite-m leaf bound for ``m`` leaves per cluster and mean head age ``a1``."""
    if m < 2:
        raise InvalidArgumentError(f"leaf bound needs m >= 2, got {m}")
    cluster_min = cluster_min_age_limit(p, lam_e, lam, a1)
    relay = p * lam / m
    gossip = m * lam / (m - 1)
    return (lam_e + relay * a1 + gossip * cluster_min) / (relay + gossip)


def cluster_leaf_ub_limit(p: float, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    _check_open_p(p)
    return (2 + 1 / p + 1 / (1 - p)) * lam_e / lam + 2


def cluster_optimum(lam_e: float, lam: float) -> Tuple[float, float]:
    """``(p*, leaf limit at p*)``; the leaf limit is convex in ``p`` and symmetric about 1/2."""
    _check_rates(lam_e, lam)
    return 0.5, 6 * lam_e / lam + 2


def disconnected_cluster_ub(c: int, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    if c < 1:
        raise InvalidArgumentError(f"c must be >= 1, got {c}")
    return (2 + c) * lam_e / lam + 1


def ring_head_age(c: int, p: float, lam_e: float, lam: float) -> float:
    """Approximate head age when heads gossip on a ring."""
    _check_rates(lam_e, lam)
    _check_open_p(p)
    return math.sqrt(math.pi / 2) * (lam_e / lam) * math.sqrt(c / (1 - p))


def ring_cluster_ub(c: int, p: float, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    _check_open_p(p)
    if c < 1:
        raise InvalidArgumentError(f"c must be >= 1, got {c}")
    return (1 + 1 / p + math.sqrt(math.pi * c / (2 * (1 - p)))) * lam_e / lam + 1


# ---------------------------------------------------------------------------
# Asymmetric source rates
# ---------------------------------------------------------------------------


def asym_ub(lam_i: float, n: int, gossip_capacity: float, lam_e: float, lam: float) -> float:
    """Upper bound for a node fed at ``lam_i`` out of a total ``lam``."""
    _check_rates(lam_e, lam)
    if not 0 <= lam_i <= lam:
        raise InvalidArgumentError(f"need 0 <= lambda_i <= lambda, got lambda_i={lam_i}, lambda={lam}")
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    per_link = gossip_capacity / (n - 1)
    numerator = lam_e / lam + per_link * (lam_e / lam**2 + 1.0 / lam)
    return numerator / (lam_i / lam + n / (n - 1))


def asym_limits(lam_e: float, lam: float) -> Tuple[float, float]:
    """``(worst, best)`` asymptotic bounds: a vanishing share versus the whole rate."""
    _check_rates(lam_e, lam)
    return 2 * lam_e / lam + 1, lam_e / lam + 0.5


def _power_law_share(i: int, nu: float, n: Optional[int]) -> float:
    if not 0 < nu < 1:
        raise InvalidArgumentError(f"nu must lie in (0, 1), got {nu}")
    if i < 1 or (n is not None and i > n):
        raise InvalidArgumentError(f"node rank must satisfy 1 <= i <= n, got i={i}, n={n}")
    tail = 1.0 if n is None else 1.0 - nu**n
    return nu**i / tail * (1 - nu) / nu


def power_law_ub(i: int, nu: float, n: int, lam_e: float, lam: float) -> float:
    """Bound for the ``i``-th ranked node (1-based) under a power-law profile with ``B = n lam``."""
    return asym_ub(lam * _power_law_share(i, nu, n), n, n * lam, lam_e, lam)


def power_law_ub_limit(i: int, nu: float, lam_e: float, lam: float) -> float:
    _check_rates(lam_e, lam)
    return (2 * lam_e / lam + 1) / (1 + _power_law_share(i, nu, None))


# ---------------------------------------------------------------------------
# Monte-Carlo recurrences
# ---------------------------------------------------------------------------

RECURRENCE_KINDS = ("min_age", "sensing", "partial", "ring", "cluster_min_age")


@dataclass(frozen=True)
class RecurrenceParams:
    """Parameters shared by the bounding recurrences; each kind reads the ones it needs."""

    lambda_e: float
    lambda_total: float
    n: Optional[int] = None
    q: Optional[float] = None
    c_coeff: float = 0.0
    gossip_capacity: Optional[float] = None
    p: Optional[float] = None
    c: Optional[int] = None
    degree: int = 2

    def capacity(self) -> float:
        if self.gossip_capacity is not None:
            return self.gossip_capacity
        if self.n is None:
            raise InvalidArgumentError("gossip capacity needs n when not given explicitly")
        return self.n * self.lambda_total


def _require(params: RecurrenceParams, kind: str, *names: str) -> None:
    missing = [name for name in names if getattr(params, name) is None]
    if missing:
        raise InvalidArgumentError(f"recurrence {kind!r} needs {', '.join(missing)}")


def mc_recurrence(
    kind: str,
    params: RecurrenceParams,
    k_max: int,
    replications: int,
    seed: int = 0,
    *,
    limit: bool = True,
) -> RecurrenceEstimate:
    """Per-epoch Monte-Carlo means of a bounding recurrence.

    Replications are vectorized. Index ``k`` of the result is epoch ``k``;
    every process starts from 0 at ``k = 0``. ``limit`` selects the
    large-network simplification of the ``sensing`` and ``partial`` branch
    probabilities instead of the finite-n forms.
    """
    if kind not in RECURRENCE_KINDS:
        raise InvalidArgumentError(f"unknown recurrence kind {kind!r}; choose from {RECURRENCE_KINDS}")
    if replications < 1:
        raise InvalidArgumentError(f"replications must be >= 1, got {replications}")
    if k_max < 1:
        raise InvalidArgumentError(f"k_max must be >= 1, got {k_max}")
    lam_e, lam = params.lambda_e, params.lambda_total
    _check_rates(lam_e, lam)

    rng = np.random.default_rng(seed)
    reps = replications
    extras: Dict[str, float] = {}

    def draw_tau() -> np.ndarray:
        if lam_e == 0:
            return np.full(reps, np.inf)
        return rng.exponential(1.0 / lam_e, size=reps)

    def coin(prob: np.ndarray) -> np.ndarray:
        return rng.random(reps) < prob

    # min_age co-simulated by every kind; value[k] is the process at epoch k.
    min_age = np.zeros(reps)
    value = np.zeros(reps)
    samples = np.zeros((k_max + 1, reps))

    if kind == "sensing" and not limit:
        _require(params, kind, "n")
        link = params.capacity() / (params.n - 1)  # type: ignore[operator]
        area = np.zeros(reps)
        span = np.zeros(reps)
    if kind == "partial":
        _require(params, kind, "q")
        _check_q(params.q)  # type: ignore[arg-type]
        if not limit:
            _require(params, kind, "n")
            fanout = math.floor(params.q * (params.n - 1))  # type: ignore[operator]
            if fanout < 1:
                raise InvalidArgumentError("partial recurrence needs floor(q (n - 1)) >= 1")
            not_min_lb = lemma3_not_min_prob_lb(params.n, lam_e, lam)  # type: ignore[arg-type]
            capacity = params.capacity()
        else:
            not_min_lb = lam / (lam_e + 2 * lam)
    if kind == "ring":
        _require(params, kind, "n")
        if params.n < params.degree + 1:  # type: ignore[operator]
            raise InvalidArgumentError(f"ring recurrence needs n >= {params.degree + 1}")
        reach = (params.degree + 1) * lam / params.n  # type: ignore[operator]
    if kind == "cluster_min_age":
        _require(params, kind, "p", "c")
        if not 0 < params.p <= 1:  # type: ignore[operator]
            raise InvalidArgumentError(f"p must lie in (0, 1], got {params.p}")
        head = np.zeros(reps)
        head_used: List[float] = []

    for k in range(1, k_max + 1):
        tau = draw_tau()
        prev_min = min_age
        min_age = np.where(coin(np.exp(-lam * tau)), prev_min + 1, 1.0)

        if kind == "min_age":
            value = min_age
        elif k == 1:
            value = np.ones(reps)
        elif kind == "sensing":
            if limit:
                stale = coin(np.exp(-lam * tau))
            else:
                # Gossip from M_{k-1} reaches the node after the silent wait plus an Exp(B/(n-1)) delay.
                wait = rng.exponential(1.0 / link, size=reps) if link > 0 else np.full(reps, np.inf)
                start = params.c_coeff * prev_min + wait
                stale = start >= tau
                if k > k_max // 2 and lam_e > 0:
                    held = np.minimum(tau, start)
                    area += value * held + prev_min * (tau - held)
                    span += tau
            value = np.where(stale, value + 1, prev_min + 1)
        elif kind == "partial":
            if limit:
                reached = params.q * (1 - np.exp(-lam * tau / params.q))  # type: ignore[operator]
                pi = not_min_lb * reached
            else:
                silent = tau - params.c_coeff * prev_min
                rate = capacity * np.maximum(silent, 0.0) / fanout
                reached = params.q * (1 - np.exp(-rate))  # type: ignore[operator]
                pi = np.where(silent > 0, not_min_lb * reached, 0.0)
            value = np.where(coin(pi), prev_min + 1, value + 1)
        elif kind == "ring":
            value = np.where(coin(np.exp(-reach * tau)), value + 1, 0.0)

        if kind == "cluster_min_age":
            relayed = ~coin(np.exp(-params.p * lam * tau))  # type: ignore[operator]
            if k > 1:
                value = np.where(relayed, head + 1, value + 1)
                if k > k_max // 2:
                    head_used.append(float(np.mean(head)))
            head = np.where(coin(np.exp(-lam / params.c * tau)), head + 1, 1.0)  # type: ignore[operator]

        samples[k] = value

    if kind == "cluster_min_age" and head_used:
        extras["head_age_mean"] = float(np.mean(head_used))
    if kind == "sensing" and not limit and k_max >= 2 and lam_e > 0:
        per_rep = area / span
        extras["time_average"] = float(per_rep.mean())
        extras["time_average_stderr"] = float(per_rep.std(ddof=1) / math.sqrt(reps)) if reps > 1 else math.nan

    mean = samples.mean(axis=1)
    if reps > 1:
        stderr = samples.std(axis=1, ddof=1) / math.sqrt(reps)
    else:
        stderr = np.full(k_max + 1, np.nan)
    return RecurrenceEstimate(kind=kind, mean=mean, stderr=stderr, replications=reps, seed=seed, extras=extras)


# ---------------------------------------------------------------------------
# Bound tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundParams:
    """Shared parameter set for :func:`bound_table`; ``None`` marks a parameter as unset."""

    lambda_e: float
    lambda_total: float
    n: Optional[int] = None
    gossip_capacity: Optional[float] = None
    q: Optional[float] = None
    c: Optional[int] = None
    m: Optional[int] = None
    p: Optional[float] = None
    nu: Optional[float] = None
    i: Optional[int] = None
    k: Optional[int] = None
    a1: Optional[float] = None

    def capacity(self) -> float:
        if self.gossip_capacity is not None:
            return self.gossip_capacity
        return (self.n or 0) * self.lambda_total


@dataclass(frozen=True)
class _BoundEntry:
    name: str
    kind: BoundKind
    needs: Tuple[str, ...]
    evaluate: Callable[[BoundParams], float]


def _leaf_ub(bp: BoundParams) -> float:
    a1 = bp.a1
    if a1 is None:
        a1 = cluster_head_ub(bp.c, bp.p, bp.lambda_e, bp.lambda_total)  # type: ignore[arg-type]
    return cluster_leaf_ub(bp.m, bp.p, bp.lambda_e, bp.lambda_total, a1)  # type: ignore[arg-type]


BOUNDS: Tuple[_BoundEntry, ...] = (
    _BoundEntry("single-node", BoundKind.EXACT, (), lambda b: single_node_age(b.lambda_e, b.lambda_total)),
    _BoundEntry("min-age-mean", BoundKind.EXACT, ("k",), lambda b: min_age_mean(b.k, b.lambda_e, b.lambda_total)),
    _BoundEntry("min-age-limit", BoundKind.LIMIT, (), lambda b: min_age_limit(b.lambda_e, b.lambda_total)),
    _BoundEntry(
        "asuman-ub", BoundKind.UPPER, ("n",), lambda b: asuman_ub(b.n, b.capacity(), b.lambda_e, b.lambda_total)
    ),
    _BoundEntry("asuman-limit", BoundKind.LIMIT, (), lambda b: asuman_ub_limit(b.lambda_e, b.lambda_total)),
    _BoundEntry("sensing-b", BoundKind.UPPER, ("k",), lambda b: sensing_bound_b(b.k, b.lambda_e, b.lambda_total)),
    _BoundEntry("sensing-limit", BoundKind.LIMIT, (), lambda b: sensing_bound_limit(b.lambda_e, b.lambda_total)),
    _BoundEntry("partial-pi", BoundKind.LOWER, ("q",), lambda b: partial_pi_tilde(b.q, b.lambda_e, b.lambda_total)),
    _BoundEntry("partial-ub", BoundKind.UPPER, ("q",), lambda b: partial_ub(b.q, b.lambda_e, b.lambda_total)),
    _BoundEntry(
        "not-min-prob", BoundKind.LOWER, ("n",), lambda b: lemma3_not_min_prob_lb(b.n, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry("ring-lb", BoundKind.LOWER, ("n",), lambda b: ring_lb(b.n, b.lambda_e, b.lambda_total)),
    _BoundEntry("grid-lb", BoundKind.LOWER, ("n",), lambda b: finite_degree_lb(b.n, 4, b.lambda_e, b.lambda_total)),
    _BoundEntry(
        "cluster-head-ub", BoundKind.UPPER, ("c", "p"), lambda b: cluster_head_ub(b.c, b.p, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry(
        "cluster-head-limit", BoundKind.LIMIT, ("p",), lambda b: cluster_head_limit(b.p, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry("cluster-leaf-ub", BoundKind.UPPER, ("m", "p", "c"), _leaf_ub),
    _BoundEntry(
        "cluster-leaf-limit",
        BoundKind.LIMIT,
        ("p",),
        lambda b: cluster_leaf_ub_limit(b.p, b.lambda_e, b.lambda_total),
    ),
    _BoundEntry("cluster-optimum", BoundKind.LIMIT, (), lambda b: cluster_optimum(b.lambda_e, b.lambda_total)[1]),
    _BoundEntry(
        "disconnected-ub", BoundKind.UPPER, ("c",), lambda b: disconnected_cluster_ub(b.c, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry(
        "ring-cluster-ub", BoundKind.UPPER, ("c", "p"), lambda b: ring_cluster_ub(b.c, b.p, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry(
        "ring-head-age", BoundKind.LIMIT, ("c", "p"), lambda b: ring_head_age(b.c, b.p, b.lambda_e, b.lambda_total)
    ),
    _BoundEntry("asym-worst", BoundKind.LIMIT, (), lambda b: asym_limits(b.lambda_e, b.lambda_total)[0]),
    _BoundEntry("asym-best", BoundKind.LIMIT, (), lambda b: asym_limits(b.lambda_e, b.lambda_total)[1]),
    _BoundEntry(
        "power-law-ub",
        BoundKind.UPPER,
        ("i", "nu", "n"),
        lambda b: power_law_ub(b.i, b.nu, b.n, b.lambda_e, b.lambda_total),
    ),
    _BoundEntry(
        "power-law-limit",
        BoundKind.LIMIT,
        ("i", "nu"),
        lambda b: power_law_ub_limit(b.i, b.nu, b.lambda_e, b.lambda_total),
    ),
)

BOUND_NAMES = tuple(entry.name for entry in BOUNDS)


def _report(entry: _BoundEntry, params: BoundParams) -> BoundReport:
    value = float(entry.evaluate(params))
    if not math.isfinite(value):
        raise InvalidArgumentError(f"{entry.name} is not finite for these parameters")
    used: Dict[str, Any] = {"lambda_e": params.lambda_e, "lambda": params.lambda_total}
    used.update({name: getattr(params, name) for name in entry.needs})
    if entry.name == "asuman-ub":
        used["B"] = params.capacity()
    if entry.name == "cluster-optimum":
        used["p"] = cluster_optimum(params.lambda_e, params.lambda_total)[0]
    return BoundReport(name=entry.name, parameters=used, value=value, kind=entry.kind)


def evaluate_bound(name: str, params: BoundParams) -> BoundReport:
    """Evaluate one named bound; missing parameters or violated preconditions raise."""
    for entry in BOUNDS:
        if entry.name == name:
            missing = [n for n in entry.needs if getattr(params, n) is None]
            if missing:
                raise InvalidArgumentError(f"bound {name!r} needs --{', --'.join(missing)}")
            return _report(entry, params)
    raise InvalidArgumentError(f"unknown bound {name!r}; choose from {', '.join(BOUND_NAMES)}")


@telemetry.traced(name="asuman_sim.bound_table")
def bound_table(params: BoundParams) -> List[BoundReport]:
    """Every bound whose parameters are set and whose preconditions hold, in registry order."""
    _check_rates(params.lambda_e, params.lambda_total)
    reports = []
    for entry in BOUNDS:
        if any(getattr(params, name) is None for name in entry.needs):
            continue
        try:
            reports.append(_report(entry, params))
        except InvalidArgumentError as exc:
            logger.debug("skipping %s: %s", entry.name, exc)
    return reports


def render_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "kind", "value", "params"])
    for r in reports:
        writer.writerow([r.name, r.kind.value, repr(r.value), r.params_text()])
    return buf.getvalue()


def render_text(reports: Sequence[BoundReport]) -> str:
    if not reports:
        return ""
    width = max(len(r.name) for r in reports)
    lines = [f"{'name':<{width}}  {'kind':<5}  {'value':>12}  params"]
    for r in reports:
        lines.append(f"{r.name:<{width}}  {r.kind.value:<5}  {r.value:>12.6g}  {r.params_text()}")
    return "\n".join(lines) + "\n"


def reports_as_dicts(reports: Sequence[BoundReport]) -> List[dict]:
    out = []
    for r in reports:
        data = asdict(r)
        data["kind"] = r.kind.value
        data["parameters"] = dict(r.parameters)
        out.append(data)
    return out
