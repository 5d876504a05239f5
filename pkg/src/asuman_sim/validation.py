"""
Acceptance suite behind ``asuman-sim validate``.

Each criterion runs its own simulations or recurrences and returns a
:class:`~asuman_sim.types.results.CriterionResult` with the measured values.
``quick`` shrinks network sizes and replication counts; ``full`` uses the
published experiment sizes and sweeps up to n = 600.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import bounds, telemetry
from ._cli_progress import PHASE_CHECKING, PHASE_FITTING, PHASE_SIMULATING, PhaseSpinner
from .engine import Event, EventKind, Phase, SimConfig, SimState, event_rates, simulate
from .experiments import run_ensemble, run_sweep
from .metrics import rank_correlation, select_model
from .scenario import RunPlan, Scenario, parse_scenario
from .types.exceptions import InvalidArgumentError
from .types.network import NetworkSpec, TopologyKind, policy_label
from .types.results import CriterionResult, EnsembleStatistics

logger = logging.getLogger(__name__)

GOLDEN_RTOL = 1e-9
Z = 3.0
HIERARCHY_MODELS = ("constant", "quarter_power", "sqrt")
# Bounded-in-n checks: log growth against the constant and its finite-size corrections.
SATURATION_MODELS = ("constant", "log", "inverse", "inv_sqrt")


@dataclass(frozen=True)
class ValidationLevel:
    name: str
    replications: int
    epochs: int
    fc_ns: Tuple[int, ...]
    ratio_ns: Tuple[int, int]
    partial_ns: Tuple[int, ...]
    ring_ns: Tuple[int, ...]
    cluster_ns: Tuple[int, ...]
    power_n: int
    min_age_n: int
    min_age_epochs: int
    recurrence_replications: int


LEVELS: Dict[str, ValidationLevel] = {
    "quick": ValidationLevel(
        name="quick",
        replications=4,
        epochs=600,
        fc_ns=(50, 100, 200, 400),
        ratio_ns=(50, 200),
        partial_ns=(50, 100, 200),
        ring_ns=(30, 60),
        cluster_ns=(64, 144, 256),
        power_n=50,
        min_age_n=50,
        min_age_epochs=2000,
        recurrence_replications=4000,
    ),
    "full": ValidationLevel(
        name="full",
        replications=20,
        epochs=2000,
        fc_ns=(50, 100, 200, 400, 600),
        ratio_ns=(100, 400),
        partial_ns=(100, 200, 400),
        ring_ns=(30, 60),
        cluster_ns=(64, 144, 256),
        power_n=100,
        min_age_n=100,
        min_age_epochs=5000,
        recurrence_replications=20000,
    ),
}


def _plan(level: ValidationLevel, seed: int, *, epochs: Optional[int] = None) -> RunPlan:
    k = epochs or level.epochs
    return RunPlan(epochs=k, warmup_epochs=int(0.2 * k), replications=level.replications, seed=seed)


def _scenario(document: Mapping[str, Any], plan: RunPlan) -> Scenario:
    doc = dict(document)
    doc["run"] = {
        "epochs": plan.epochs,
        "warmup_epochs": plan.warmup_epochs,
        "replications": plan.replications,
        "seed": plan.seed,
    }
    return parse_scenario(doc)


def _subset_mean(stats: EnsembleStatistics, nodes: Sequence[int]) -> Tuple[float, float]:
    """Mean over ``nodes`` and its standard error across replications (0 for a single run)."""
    per_run = np.array([np.mean([run.node_means[i] for i in nodes]) for run in stats.runs])
    se = float(per_run.std(ddof=1) / math.sqrt(len(per_run))) if len(per_run) > 1 else 0.0
    return float(per_run.mean()), se


def _rel_close(a: float, b: float, rtol: float) -> bool:
    return math.isclose(a, b, rel_tol=rtol, abs_tol=rtol if b == 0 else 0.0)


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def single_node_oracle(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    expected = bounds.single_node_age(1.0, 1.0)
    measured: Dict[str, Any] = {"expected": expected}
    passed = True
    for kind in ("asuman", "uniform"):
        sc = _scenario({"topology": {"kind": "complete", "n": 1}, "policy": {"kind": kind}}, _plan(level, seed))
        stats = run_ensemble(sc.spec, sc.plan, jobs=jobs)
        se = stats.network_stderr or 0.0
        measured[kind] = stats.network_mean
        passed &= abs(stats.network_mean - expected) <= Z * se or _rel_close(stats.network_mean, expected, 1e-9)
    return CriterionResult(1, "single-node oracle", passed, measured)


def min_age_agreement(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    expected = bounds.min_age_limit(1.0, 1.0)
    plan = _plan(level, seed, epochs=level.min_age_epochs)
    sc = _scenario({"topology": {"kind": "complete", "n": level.min_age_n}}, plan)
    stats = run_ensemble(sc.spec, plan, jobs=jobs)
    value = stats.min_age_mean if stats.min_age_mean is not None else math.nan
    passed = abs(value - expected) <= 0.03 * expected
    return CriterionResult(
        2, "minimum-age recurrence", passed, {"n": level.min_age_n, "mean_min_age": value, "expected": expected}
    )


def _fc_sweep(
    level: ValidationLevel, seed: int, jobs: int, policy: str, lambda_e: float
) -> List[Tuple[float, EnsembleStatistics]]:
    doc = {
        "topology": {"kind": "complete", "n": level.fc_ns[0]},
        "rates": {"lambda_e": lambda_e},
        "policy": {"kind": policy},
    }
    plan = _plan(level, seed)
    points = run_sweep(_scenario(doc, plan), "n", [float(n) for n in level.fc_ns], jobs, plan=plan)
    return [(p.value, p.stats) for p in points]


def _finite_sensing_bound(level: ValidationLevel, seed: int, lambda_e: float, n: int) -> Tuple[float, float]:
    """Time-averaged sensing bound at size ``n`` with ``C = 1/n``, and its Monte-Carlo standard error."""
    params = bounds.RecurrenceParams(lambda_e, 1.0, n=n, c_coeff=1.0 / n)
    est = bounds.mc_recurrence("sensing", params, 100, level.recurrence_replications, seed, limit=False)
    return est.extras["time_average"], est.extras["time_average_stderr"]


def _noise(errors: Sequence[Optional[float]]) -> float:
    return max((e or 0.0) for e in errors)


def asuman_constant_bound(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    measured: Dict[str, Any] = {}
    passed = True
    for lam_e in (1.0, 2.0):
        limit = bounds.asuman_ub_limit(lam_e, 1.0)
        measured[f"limit(le={lam_e:g})"] = limit
        sweep = _fc_sweep(level, seed, jobs, "asuman", lam_e)
        for n, stats in sweep:
            finite, finite_se = _finite_sensing_bound(level, seed, lam_e, int(n))
            measured[f"a(n={int(n)},le={lam_e:g})"] = stats.network_mean
            measured[f"ub(n={int(n)},le={lam_e:g})"] = finite
            passed &= stats.lower_ci(Z) <= max(limit, finite + Z * finite_se)
        noise = _noise([s.network_stderr for _, s in sweep])
        best = select_model([(n, s.network_mean) for n, s in sweep], SATURATION_MODELS, noise=noise, z=Z)
        measured[f"best_fit(le={lam_e:g})"] = best.model
        passed &= best.bounded
    return CriterionResult(3, "ASUMAN bounded age", passed, measured)


def uniform_log_growth(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    sweep = _fc_sweep(level, seed, jobs, "uniform", 1.0)
    ages = {int(n): s.network_mean for n, s in sweep}
    best = select_model(list(ages.items()), ("constant", "log", "sqrt"))
    lo, hi = level.ratio_ns
    ratio = ages[hi] / ages[lo]
    target = math.log(hi) / math.log(lo)
    passed = best.model == "log" and abs(ratio - target) <= 0.15 * target
    measured: Dict[str, Any] = {f"a(n={n})": a for n, a in ages.items()}
    measured.update(best_fit=best.model, ratio=ratio, log_ratio=target)
    return CriterionResult(4, "uniform gossip log growth", passed, measured)


def partial_connectivity(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    measured: Dict[str, Any] = {}
    passed = True
    by_q: Dict[float, Dict[int, float]] = {}
    plan = _plan(level, seed)
    for q in (0.5, 1.0 / 3.0):
        ub = bounds.partial_ub(q, 1.0, 1.0)
        doc = {"topology": {"kind": "partial", "n": level.partial_ns[0], "q": q}}
        points = run_sweep(_scenario(doc, plan), "n", [float(n) for n in level.partial_ns], jobs, plan=plan)
        by_q[q] = {}
        for p in points:
            by_q[q][int(p.value)] = p.stats.network_mean
            measured[f"a(n={int(p.value)},q={q:.3g})"] = p.stats.network_mean
            passed &= p.stats.lower_ci(Z) <= ub
        noise = _noise([p.stats.network_stderr for p in points])
        series = [(p.value, p.stats.network_mean) for p in points]
        best = select_model(series, SATURATION_MODELS, noise=noise, z=Z)
        measured[f"best_fit(q={q:.3g})"] = best.model
        measured[f"bound(q={q:.3g})"] = ub
        passed &= best.bounded
    for n in level.partial_ns:
        passed &= by_q[1.0 / 3.0][n] > by_q[0.5][n]
    return CriterionResult(5, "partial connectivity", passed, measured)


def ring_lower_bound(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    """Ring ASUMAN grows linearly in n and loses to uniform gossip.

    The one-hop lower-bound process is reported next to each mean. Fresh
    versions also spread hop by hop across update-free epochs, so the mean
    sits a constant factor below that process; the pass condition tests the
    growth order instead: ``a(hi) - sqrt(hi/lo) a(lo)`` must clear ``Z``
    standard errors, which no ``O(sqrt(n))`` curve with a nonnegative offset does.
    """
    measured: Dict[str, Any] = {}
    plan = _plan(level, seed)
    asuman_at: Dict[int, Tuple[float, float]] = {}
    for n in level.ring_ns:
        lb = bounds.ring_lb(n, 1.0, 1.0)
        sc = _scenario({"topology": {"kind": "ring", "n": n}}, plan)
        stats = run_ensemble(sc.spec, plan, jobs=jobs)
        asuman_at[n] = (stats.network_mean, stats.network_stderr or 0.0)
        measured[f"a(n={n})"] = stats.network_mean
        measured[f"lb(n={n})"] = lb
        measured[f"a/lb(n={n})"] = stats.network_mean / lb
    lo, hi = min(level.ring_ns), max(level.ring_ns)
    (a_lo, se_lo), (a_hi, se_hi) = asuman_at[lo], asuman_at[hi]
    stretch = math.sqrt(hi / lo)
    gap = a_hi - stretch * a_lo
    gap_se = math.sqrt(se_hi**2 + stretch**2 * se_lo**2)
    measured.update(linear_gap=gap, linear_gap_se=gap_se)
    passed = gap > Z * gap_se
    sc = _scenario({"topology": {"kind": "ring", "n": hi}, "policy": {"kind": "uniform"}}, plan)
    uniform = run_ensemble(sc.spec, plan, jobs=jobs).network_mean
    measured[f"uniform(n={hi})"] = uniform
    passed &= uniform < a_hi
    return CriterionResult(6, "ring linear growth", passed, measured)


_CLUSTER_EXPECTED = {"complete": "constant", "none": "sqrt", "ring": "quarter_power"}


def clustered_scalings(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    measured: Dict[str, Any] = {}
    passed = True
    plan = _plan(level, seed)
    leaf_limit = bounds.cluster_optimum(1.0, 1.0)[1]
    for links, expected in _CLUSTER_EXPECTED.items():
        doc = {"topology": {"kind": "clustered", "n": level.cluster_ns[0], "head_links": links}, "policy": {"p": 0.5}}
        points = run_sweep(_scenario(doc, plan), "n", [float(n) for n in level.cluster_ns], jobs, plan=plan)
        series = []
        errors = []
        for p in points:
            topo = p.scenario.spec.topology
            leaves = [i for i in range(topo.n) if not topo.is_head(i)]
            mean, se = _subset_mean(p.stats, leaves)
            series.append((p.value, mean))
            errors.append(se)
            measured[f"leaf(n={int(p.value)},{links})"] = mean
            if links == "complete":
                passed &= mean - Z * se <= leaf_limit
        if expected == "constant":
            best = select_model(series, HIERARCHY_MODELS + ("inverse", "inv_sqrt"), noise=_noise(errors), z=Z)
            passed &= best.bounded
        else:
            best = select_model(series, HIERARCHY_MODELS, noise=_noise(errors), z=Z)
            passed &= best.model == expected
        measured[f"best_fit({links})"] = best.model
    return CriterionResult(7, "clustered scalings", passed, measured)


def power_law_nodes(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    measured: Dict[str, Any] = {}
    passed = True
    n = level.power_n
    worst = bounds.asym_limits(1.0, 1.0)[0]
    plan = _plan(level, seed)
    for nu in (0.35, 0.75, 0.95):
        sc = _scenario({"topology": {"kind": "complete", "n": n}, "profile": {"kind": "power_law", "nu": nu}}, plan)
        stats = run_ensemble(sc.spec, plan, jobs=jobs)
        errs = stats.node_stderr or tuple(0.0 for _ in stats.node_means)
        violations = 0
        for idx, (mean, se) in enumerate(zip(stats.node_means, errs)):
            ub = bounds.power_law_ub(idx + 1, nu, n, 1.0, 1.0)
            if mean - Z * se > ub or mean - Z * se > worst:
                violations += 1
        rho = rank_correlation(list(sc.spec.profile.per_node_rates), list(stats.node_means))
        measured[f"violations(nu={nu})"] = violations
        measured[f"spearman(nu={nu})"] = rho
        measured[f"max_age(nu={nu})"] = max(stats.node_means)
        passed &= violations == 0 and rho < 0
    return CriterionResult(8, "power-law node bounds", passed, measured)


class _PropertyChecker:
    """Observer asserting per-event invariants; collects messages instead of raising."""

    def __init__(self, spec: NetworkSpec, check_capacity: bool) -> None:
        self.spec = spec
        self.check_capacity = check_capacity
        self.problems: List[str] = []
        self._prev: Optional[List[int]] = None
        self.events = 0

    def __call__(self, ev: Event, state: SimState) -> None:
        self.events += 1
        versions = state.age.node_versions
        src_version = state.age.source_version
        if any(v > src_version or v < 0 for v in versions):
            self.problems.append(f"negative age at t={ev.t:.6g}")
        if ev.kind is EventKind.GOSSIP:
            idx = state.scope_of[ev.src]
            scope = state.scopes[idx] if idx is not None else None
            if scope is None:
                self.problems.append(f"gossip from scopeless node {ev.src}")
            elif scope.opportunistic:
                if scope.phase is Phase.SENSING:
                    self.problems.append(f"gossip during sensing at t={ev.t:.6g}")
                if ev.src not in scope.active_set:
                    self.problems.append(f"gossip from non-minimum node {ev.src}")
                snapshot = scope.frozen_versions.get(ev.src) if scope.frozen_versions is not None else None
                if snapshot is not None and self._prev is not None:
                    if versions[ev.dst] != self._prev[ev.dst] and versions[ev.dst] > snapshot:
                        self.problems.append(f"frozen transmission above snapshot from {ev.src}")
        if self.check_capacity and state.phase is Phase.GOSSIPING:
            total = event_rates(state, self.spec).total_gossip
            capacity = self.spec.rates.gossip_capacity
            if not _rel_close(total, capacity, 1e-9):
                self.problems.append(f"gossip rate {total:.12g} != B={capacity:.12g}")
        self._prev = list(versions)


_PROPERTY_DOCS: Tuple[Mapping[str, Any], ...] = (
    {"topology": {"kind": "complete", "n": 8}},
    {"topology": {"kind": "complete", "n": 8}, "policy": {"kind": "asuman", "frozen": True}},
    {"topology": {"kind": "partial", "n": 10, "q": 0.5}},
    {"topology": {"kind": "ring", "n": 8}},
    {"topology": {"kind": "grid", "rows": 3, "cols": 3}},
    {"topology": {"kind": "clustered", "c": 3, "m": 3, "head_links": "complete"}},
    {"topology": {"kind": "clustered", "c": 3, "m": 3, "head_links": "ring"}, "policy": {"frozen": True}},
    {"topology": {"kind": "complete", "n": 8}, "policy": {"kind": "uniform"}},
)


def property_suite(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    measured: Dict[str, Any] = {}
    problems: List[str] = []
    plan = RunPlan(epochs=200, warmup_epochs=40, replications=1, seed=seed)
    for number, doc in enumerate(_PROPERTY_DOCS):
        spec = _scenario(doc, plan).spec
        opportunistic_complete = spec.topology.kind is TopologyKind.COMPLETE and doc.get("policy", {}).get(
            "kind", "asuman"
        ) == "asuman"
        checker = _PropertyChecker(spec, check_capacity=opportunistic_complete)
        traces: List[List[str]] = [[], []]
        for attempt in (0, 1):
            config = SimConfig(
                spec=spec, horizon_epochs=plan.epochs, warmup_epochs=plan.warmup_epochs, seed=seed + number
            )
            simulate(config, trace=traces[attempt].append, observer=checker if attempt == 0 else None)
        if traces[0] != traces[1]:
            problems.append(f"replay mismatch for {spec.summary()}")
        problems.extend(f"{spec.summary()}: {p}" for p in checker.problems[:3])
        measured[f"events[{number}:{spec.topology.kind.value}/{policy_label(spec.policy)}]"] = checker.events
    detail = "; ".join(problems[:5])
    return CriterionResult(9, "property suite", not problems, measured, detail)


_GOLDEN: Tuple[Tuple[str, Callable[[], float], float], ...] = (
    ("asuman_ub(n=2,B=2)", lambda: bounds.asuman_ub(2, 2.0, 1.0, 1.0), 2.0),
    ("asuman_limit(le=1)", lambda: bounds.asuman_ub_limit(1.0, 1.0), 3.0),
    ("asuman_limit(le=2)", lambda: bounds.asuman_ub_limit(2.0, 1.0), 5.0),
    ("min_age_limit", lambda: bounds.min_age_limit(1.0, 1.0), 2.0),
    ("min_age_limit(le=2)", lambda: bounds.min_age_limit(2.0, 1.0), 3.0),
    ("partial_ub(q=1)", lambda: bounds.partial_ub(1.0, 1.0, 1.0), 8.0),
    ("partial_ub(q=1/2)", lambda: bounds.partial_ub(0.5, 1.0, 1.0), 11.0),
    ("partial_ub(q=1/3)", lambda: bounds.partial_ub(1.0 / 3.0, 1.0, 1.0), 14.0),
    ("ring_lb(n=30)", lambda: bounds.ring_lb(30, 1.0, 1.0), 10.0),
    ("ring_lb(n=60)", lambda: bounds.ring_lb(60, 1.0, 1.0), 20.0),
    ("head_limit(p=1/2)", lambda: bounds.cluster_head_limit(0.5, 1.0, 1.0), 4.0),
    ("leaf_limit(p=1/2)", lambda: bounds.cluster_leaf_ub_limit(0.5, 1.0, 1.0), 8.0),
    ("cluster_optimum", lambda: bounds.cluster_optimum(1.0, 1.0)[1], 8.0),
    ("disconnected_ub(c=10)", lambda: bounds.disconnected_cluster_ub(10, 1.0, 1.0), 13.0),
    ("not_min_lb(n=2)", lambda: bounds.lemma3_not_min_prob_lb(2, 1.0, 1.0), 1.0 / 7.0),
    ("asym_best", lambda: bounds.asym_limits(1.0, 1.0)[1], 1.5),
)


def _recurrence_checks(level: ValidationLevel, seed: int) -> Tuple[bool, Dict[str, Any]]:
    measured: Dict[str, Any] = {}
    k_max = 50
    est = bounds.mc_recurrence(
        "min_age", bounds.RecurrenceParams(1.0, 1.0), k_max, level.recurrence_replications, seed
    )
    closed = bounds.min_age_series(k_max, 1.0, 1.0)
    z = []
    for k in range(1, k_max + 1):
        se = est.stderr[k]
        diff = abs(est.mean[k] - closed[k])
        z.append(0.0 if diff <= 1e-9 else (diff / se if se > 0 else math.inf))
    outside = sum(1 for v in z if v > Z)
    # At most 5% of epochs outside 3 se, none outside 4 se.
    min_age_ok = max(z) <= Z + 1.0 and outside <= math.ceil(0.05 * k_max)
    measured.update(min_age_max_z=max(z), min_age_outside=outside)

    n = 30
    ring = bounds.mc_recurrence(
        "ring", bounds.RecurrenceParams(1.0, 1.0, n=n), 20 * n, level.recurrence_replications, seed + 1
    )
    k0 = 10 * n
    tail = ring.tail_mean(k0)
    tol = Z * float(np.max(ring.stderr[k0:]))
    lb = bounds.ring_lb(n, 1.0, 1.0)
    measured.update(ring_tail=tail, ring_limit=lb)
    return min_age_ok and abs(tail - lb) <= tol, measured


def bounds_golden(level: ValidationLevel, seed: int, jobs: int) -> CriterionResult:
    failures = [name for name, fn, expected in _GOLDEN if not _rel_close(fn(), expected, GOLDEN_RTOL)]
    ok, measured = _recurrence_checks(level, seed)
    measured["golden_checked"] = len(_GOLDEN)
    measured["golden_failed"] = len(failures)
    return CriterionResult(10, "bounds golden values", ok and not failures, measured, ", ".join(failures))


CRITERIA: Tuple[Callable[[ValidationLevel, int, int], CriterionResult], ...] = (
    single_node_oracle,
    min_age_agreement,
    asuman_constant_bound,
    uniform_log_growth,
    partial_connectivity,
    ring_lower_bound,
    clustered_scalings,
    power_law_nodes,
    property_suite,
    bounds_golden,
)


def _phase_for(number: int) -> str:
    if number in (9, 10):
        return PHASE_CHECKING
    if number in (3, 4, 5, 7):
        return PHASE_FITTING
    return PHASE_SIMULATING


@telemetry.traced(name="asuman_sim.run_validation")
def run_validation(
    level: str = "quick",
    *,
    seed: int = 0,
    jobs: int = 1,
    only: Optional[Sequence[int]] = None,
    spinner: Optional[PhaseSpinner] = None,
) -> List[CriterionResult]:
    """Run the acceptance criteria in order; ``only`` restricts to the given criterion numbers."""
    if level not in LEVELS:
        raise InvalidArgumentError(f"unknown validation level {level!r}; choose from {', '.join(LEVELS)}")
    cfg = LEVELS[level]
    results = []
    for number, criterion in enumerate(CRITERIA, start=1):
        if only and number not in only:
            continue
        if spinner is not None:
            spinner.phase(f"{_phase_for(number)} criterion {number}")
        result = criterion(cfg, seed, jobs)
        log = logger.info if result.passed else logger.warning
        log("criterion %d %s: %s %s", result.number, result.name, result.status, result.detail)
        results.append(result)
    return results


def render_results(results: Sequence[CriterionResult]) -> str:
    lines = []
    for r in results:
        values = " ".join(f"{k}={_fmt(v)}" for k, v in r.measured.items())
        line = f"[{r.status}] {r.number:>2} {r.name}: {values}"
        if r.detail:
            line += f" ({r.detail})"
        lines.append(line)
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)
