"""
Scenario documents: JSON files that describe a network and a run plan.

A scenario has five sections::

    {
      "topology": {"kind": "complete", "n": 100},
      "rates":    {"lambda_e": 1.0, "lambda": 1.0, "B": 100.0},
      "profile":  "uniform",
      "policy":   {"kind": "asuman", "C": 0.01},
      "run":      {"epochs": 2000, "warmup_epochs": 400, "replications": 20, "seed": 0}
    }

Only ``topology`` is required. Unknown keys are rejected.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_WARMUP_FRACTION
from .core import validate_spec
from .topology import (
    build_clustered,
    build_complete,
    build_grid,
    build_partial,
    build_ring,
    rate_profile_clustered,
    rate_profile_power_law,
    rate_profile_uniform,
)
from .types.exceptions import InvalidArgumentError, ScenarioError
from .types.network import (
    HEAD_POLICY_FOR_LINKS,
    Asuman,
    AsumanFrozen,
    HeadLinks,
    HeadPolicy,
    Hierarchical,
    NetworkSpec,
    PolicyKind,
    RateProfile,
    Rates,
    Topology,
    TopologyKind,
    UniformGossip,
)

logger = logging.getLogger(__name__)

DEFAULT_EPOCHS = 2000
DEFAULT_REPLICATIONS = 20
DEFAULT_P_SPLIT = 0.5

_SECTIONS = {"topology", "rates", "profile", "policy", "run"}
_TOPOLOGY_KEYS = {"kind", "n", "q", "rows", "cols", "wrap", "c", "m", "head_links"}
_RATE_KEYS = {"lambda_e", "lambda", "B"}
_PROFILE_KEYS = {"kind", "nu"}
_POLICY_KEYS = {"kind", "C", "p", "frozen", "head_policy"}
_RUN_KEYS = {"epochs", "warmup_epochs", "replications", "seed"}

SWEEP_PARAMETERS = ("n", "q", "nu", "p", "c")


@dataclass(frozen=True)
class RunPlan:
    epochs: int = DEFAULT_EPOCHS
    warmup_epochs: int = int(DEFAULT_WARMUP_FRACTION * DEFAULT_EPOCHS)
    replications: int = DEFAULT_REPLICATIONS
    seed: int = 0


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario; ``document`` is the source mapping, kept for overrides."""

    spec: NetworkSpec
    plan: RunPlan
    document: Mapping[str, Any]


def _section(doc: Mapping[str, Any], name: str, allowed: set) -> Dict[str, Any]:
    value = doc.get(name, {})
    if not isinstance(value, Mapping):
        raise ScenarioError([f"{name} must be an object"])
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ScenarioError([f"unknown key {name}.{key}" for key in unknown])
    return dict(value)


def _number(section: str, data: Mapping[str, Any], key: str, default: Any = None, kind: type = float) -> Any:
    if key not in data or data[key] is None:
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError([f"{section}.{key} must be a number, got {value!r}"])
    if kind is int:
        if float(value) != int(value):
            raise ScenarioError([f"{section}.{key} must be an integer, got {value!r}"])
        return int(value)
    return float(value)


def _build_topology(data: Mapping[str, Any]) -> Topology:
    try:
        kind = TopologyKind(data.get("kind", "complete"))
    except ValueError as exc:
        raise ScenarioError([f"unknown topology kind {data.get('kind')!r}"]) from exc
    n = _number("topology", data, "n", kind=int)

    if kind is TopologyKind.GRID:
        rows = _number("topology", data, "rows", kind=int)
        cols = _number("topology", data, "cols", kind=int)
        if rows is None or cols is None:
            side = math.isqrt(n) if n is not None else 0
            if n is None or side * side != n:
                raise ScenarioError(["grid needs rows and cols, or a square n"])
            rows = cols = side
        return build_grid(rows, cols, wrap=bool(data.get("wrap", True)))

    if kind is TopologyKind.CLUSTERED:
        c = _number("topology", data, "c", kind=int)
        m = _number("topology", data, "m", kind=int)
        if c is None or m is None:
            if n is None:
                raise ScenarioError(["clustered topology needs c and m, or n"])
            side = max(round(math.sqrt(n)), 1)
            c = side if c is None else c
            m = side if m is None else m
        try:
            links = HeadLinks(data.get("head_links", "complete"))
        except ValueError as exc:
            raise ScenarioError([f"unknown head_links {data.get('head_links')!r}"]) from exc
        return build_clustered(c, m, links)

    if n is None:
        raise ScenarioError([f"{kind.value} topology needs n"])
    if kind is TopologyKind.COMPLETE:
        return build_complete(n)
    if kind is TopologyKind.PARTIAL:
        q = _number("topology", data, "q")
        if q is None:
            raise ScenarioError(["partial topology needs q"])
        return build_partial(n, q)
    return build_ring(n)


def _build_profile(raw: Any, topology: Topology, lam: float) -> RateProfile:
    if raw is None:
        raw = "clustered" if topology.is_clustered else "uniform"
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, Mapping):
        raise ScenarioError(["profile must be a string or an object"])
    unknown = sorted(set(raw) - _PROFILE_KEYS)
    if unknown:
        raise ScenarioError([f"unknown key profile.{key}" for key in unknown])
    kind = raw.get("kind", "uniform")
    if kind == "uniform":
        return rate_profile_uniform(lam, topology.n)
    if kind == "power_law":
        nu = _number("profile", raw, "nu")
        if nu is None:
            raise ScenarioError(["power_law profile needs nu"])
        return rate_profile_power_law(lam, nu, topology.n)
    if kind == "clustered":
        return rate_profile_clustered(lam, topology)
    raise ScenarioError([f"unknown profile kind {kind!r}"])


def _build_policy(data: Mapping[str, Any], topology: Topology) -> PolicyKind:
    kind = data.get("kind", "hierarchical" if topology.is_clustered else "asuman")
    c_coeff = _number("policy", data, "C", default=1.0 / topology.n)
    frozen = data.get("frozen", False)
    if not isinstance(frozen, bool):
        raise ScenarioError([f"policy.frozen must be a boolean, got {frozen!r}"])

    if kind == "uniform":
        return UniformGossip()
    if kind == "asuman":
        return AsumanFrozen(c_coeff) if frozen else Asuman(c_coeff)
    if kind == "asuman_frozen":
        return AsumanFrozen(c_coeff)
    if kind == "hierarchical":
        head = data.get("head_policy")
        if head is None:
            head_policy = HEAD_POLICY_FOR_LINKS.get(topology.head_links or HeadLinks.COMPLETE, HeadPolicy.FULL_ASUMAN)
        else:
            try:
                head_policy = HeadPolicy(head)
            except ValueError as exc:
                raise ScenarioError([f"unknown head_policy {head!r}"]) from exc
        p_split = _number("policy", data, "p", default=DEFAULT_P_SPLIT)
        return Hierarchical(p_split=p_split, head_policy=head_policy, c_coeff=c_coeff, frozen=frozen)
    raise ScenarioError([f"unknown policy kind {kind!r}"])


def _build_plan(data: Mapping[str, Any], warmup_fraction: float) -> RunPlan:
    epochs = _number("run", data, "epochs", default=DEFAULT_EPOCHS, kind=int)
    warmup = _number("run", data, "warmup_epochs", kind=int)
    if warmup is None:
        warmup = min(int(warmup_fraction * epochs), max(epochs - 1, 0))
    plan = RunPlan(
        epochs=epochs,
        warmup_epochs=warmup,
        replications=_number("run", data, "replications", default=DEFAULT_REPLICATIONS, kind=int),
        seed=_number("run", data, "seed", default=0, kind=int),
    )
    problems = plan_problems(plan)
    if problems:
        raise ScenarioError(problems)
    return plan


def plan_problems(plan: RunPlan) -> List[str]:
    problems = []
    if plan.epochs < 1:
        problems.append(f"run.epochs must be >= 1, got {plan.epochs}")
    if not 0 <= plan.warmup_epochs < max(plan.epochs, 1):
        problems.append(f"run.warmup_epochs must lie in [0, epochs), got {plan.warmup_epochs}")
    if plan.replications < 1:
        problems.append(f"run.replications must be >= 1, got {plan.replications}")
    if plan.seed < 0:
        problems.append(f"run.seed must be nonnegative, got {plan.seed}")
    return problems


def override_plan(
    plan: RunPlan,
    *,
    seed: Optional[int] = None,
    replications: Optional[int] = None,
    epochs: Optional[int] = None,
    warmup_fraction: Optional[float] = None,
) -> RunPlan:
    """Replace the given plan fields; a new horizon recomputes the warmup when ``warmup_fraction`` is set."""
    changes: Dict[str, int] = {}
    if seed is not None:
        changes["seed"] = seed
    if replications is not None:
        changes["replications"] = replications
    if epochs is not None:
        changes["epochs"] = epochs
        if warmup_fraction is not None:
            changes["warmup_epochs"] = min(int(warmup_fraction * epochs), max(epochs - 1, 0))
    updated = dataclasses.replace(plan, **changes)
    problems = plan_problems(updated)
    if problems:
        raise ScenarioError(problems)
    return updated


def parse_scenario(document: Mapping[str, Any], *, warmup_fraction: float = DEFAULT_WARMUP_FRACTION) -> Scenario:
    """Build a validated :class:`Scenario` from a decoded JSON mapping."""
    if not isinstance(document, Mapping):
        raise ScenarioError(["scenario must be a JSON object"])
    unknown = sorted(set(document) - _SECTIONS)
    if unknown:
        raise ScenarioError([f"unknown key {key}" for key in unknown])
    if "topology" not in document:
        raise ScenarioError(["scenario needs a topology section"])

    topo_data = _section(document, "topology", _TOPOLOGY_KEYS)
    rate_data = _section(document, "rates", _RATE_KEYS)
    policy_data = _section(document, "policy", _POLICY_KEYS)
    run_data = _section(document, "run", _RUN_KEYS)

    try:
        topology = _build_topology(topo_data)
        lam_e = _number("rates", rate_data, "lambda_e", default=1.0)
        lam = _number("rates", rate_data, "lambda", default=1.0)
        capacity = _number("rates", rate_data, "B", default=topology.n * lam)
        profile = _build_profile(document.get("profile"), topology, lam)
        policy = _build_policy(policy_data, topology)
    except InvalidArgumentError as exc:
        raise ScenarioError([str(exc)]) from exc

    spec = NetworkSpec(
        topology=topology,
        rates=Rates(lambda_e=lam_e, lambda_total=lam, gossip_capacity=capacity),
        profile=profile,
        policy=policy,
    )
    violations = validate_spec(spec)
    if violations:
        raise ScenarioError(violations)
    return Scenario(spec=spec, plan=_build_plan(run_data, warmup_fraction), document=copy.deepcopy(dict(document)))


def load_scenario(path: Union[str, Path], *, warmup_fraction: float = DEFAULT_WARMUP_FRACTION) -> Scenario:
    """Read and parse a scenario file. ``OSError`` propagates; bad JSON raises :class:`ScenarioError`."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"{path}: malformed JSON: {exc}"]) from exc
    logger.debug("loaded scenario %s", path)
    return parse_scenario(document, warmup_fraction=warmup_fraction)


def apply_override(scenario: Scenario, parameter: str, value: float) -> Scenario:
    """Re-parse ``scenario`` with one sweep parameter replaced.

    ``n`` on a clustered topology sets ``c = m = round(sqrt(n))``. ``C``
    keeps its ``1 / n`` default unless the document sets it.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ScenarioError([f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEP_PARAMETERS)}"])
    doc: Dict[str, Any] = copy.deepcopy(dict(scenario.document))
    topo = dict(doc.get("topology", {}))
    kind = topo.get("kind", "complete")

    if parameter == "n":
        n = int(value)
        if kind == "clustered":
            side = max(round(math.sqrt(n)), 1)
            topo.pop("n", None)
            topo.update(c=side, m=side)
        elif kind == "grid":
            topo.pop("rows", None)
            topo.pop("cols", None)
            topo["n"] = n
        else:
            topo["n"] = n
    elif parameter == "q":
        topo["q"] = float(value)
    elif parameter == "c":
        if kind != "clustered":
            raise ScenarioError(["sweep parameter c needs a clustered topology"])
        topo["c"] = int(value)
    elif parameter == "nu":
        doc["profile"] = {"kind": "power_law", "nu": float(value)}
    elif parameter == "p":
        policy = dict(doc.get("policy", {}))
        policy["p"] = float(value)
        doc["policy"] = policy
    doc["topology"] = topo

    # Capacity follows n unless pinned by the document.
    return parse_scenario(doc, warmup_fraction=_warmup_fraction(scenario.plan))


def _warmup_fraction(plan: RunPlan) -> float:
    return plan.warmup_epochs / plan.epochs if plan.epochs else DEFAULT_WARMUP_FRACTION


def parse_sweep(text: str) -> Tuple[str, Tuple[float, ...]]:
    """Parse ``"param=v1,v2,..."``; any item may be an inclusive range ``start:stop:step``.

    ``"n=50:200:50"`` gives ``(50, 100, 150, 200)`` and ``"q=0.1,0.5:1:0.25"``
    gives ``(0.1, 0.5, 0.75, 1.0)``.
    """
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or name not in SWEEP_PARAMETERS:
        raise ScenarioError(
            [f"sweep must look like param=v1,v2 or param=start:stop:step with param in {', '.join(SWEEP_PARAMETERS)}"]
        )
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not items:
        raise ScenarioError([f"sweep {name} has no values"])
    parsed: List[float] = []
    try:
        for item in items:
            parsed.extend(_sweep_range(name, item) if ":" in item else [float(item)])
    except ValueError as exc:
        raise ScenarioError([f"sweep {name} has a non-numeric value: {exc}"]) from exc
    return name, tuple(parsed)


def _sweep_range(name: str, item: str) -> List[float]:
    fields = item.split(":")
    if len(fields) != 3:
        raise ScenarioError([f"sweep {name} range {item!r} must be start:stop:step"])
    start, stop, step = (float(f) for f in fields)
    if not step > 0 or stop < start:
        raise ScenarioError([f"sweep {name} range {item!r} needs step > 0 and stop >= start"])
    # Half a step of slack keeps ``stop`` itself despite float rounding.
    grid = np.arange(start, stop + step / 2.0, step)
    return [float(v) for v in np.round(grid, 12)]
