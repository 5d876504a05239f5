"""
asuman-sim

Event-driven simulation and closed-form bounds for version-age gossip
networks: the opportunistic age-sensing policy, uniform gossip, and
complete, partial, ring, grid and clustered topologies.
"""

__version__ = "0.1.0"

from .bounds import BOUND_NAMES, BoundParams, RecurrenceParams, bound_table, evaluate_bound, mc_recurrence
from .config import SimSettings
from .core import ensure_valid, min_age_set, validate_spec
from .engine import SimConfig, simulate
from .experiments import derive_seed, run_ensemble, run_sweep
from .metrics import AgeAccumulator, epoch_min_age_mean, fit_scaling, merge, rank_correlation, select_model
from .scenario import RunPlan, Scenario, load_scenario, parse_scenario
from .telemetry import configure_otel, setup_logging, trace, traced
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
from .types import (
    AgeVector,
    Asuman,
    AsumanFrozen,
    AsumanSimError,
    BoundKind,
    BoundReport,
    ConfigurationError,
    CriterionResult,
    EnsembleStatistics,
    HeadLinks,
    HeadPolicy,
    Hierarchical,
    InternalConsistencyError,
    InvalidArgumentError,
    NetworkSpec,
    RateProfile,
    Rates,
    RecurrenceEstimate,
    RunStatistics,
    ScalingFit,
    ScenarioError,
    SimulationStalledError,
    Topology,
    TopologyKind,
    UniformGossip,
)

__all__ = [
    "__version__",
    # Topologies and rate profiles
    "build_complete",
    "build_partial",
    "build_ring",
    "build_grid",
    "build_clustered",
    "rate_profile_uniform",
    "rate_profile_power_law",
    "rate_profile_clustered",
    # Types
    "AgeVector",
    "Rates",
    "RateProfile",
    "Topology",
    "TopologyKind",
    "HeadLinks",
    "HeadPolicy",
    "NetworkSpec",
    "UniformGossip",
    "Asuman",
    "AsumanFrozen",
    "Hierarchical",
    "RunStatistics",
    "EnsembleStatistics",
    "ScalingFit",
    "BoundKind",
    "BoundReport",
    "RecurrenceEstimate",
    "CriterionResult",
    # Core and engine
    "min_age_set",
    "validate_spec",
    "ensure_valid",
    "SimConfig",
    "simulate",
    # Metrics
    "AgeAccumulator",
    "epoch_min_age_mean",
    "merge",
    "fit_scaling",
    "select_model",
    "rank_correlation",
    # Bounds
    "BOUND_NAMES",
    "BoundParams",
    "RecurrenceParams",
    "evaluate_bound",
    "bound_table",
    "mc_recurrence",
    # Experiments
    "RunPlan",
    "Scenario",
    "load_scenario",
    "parse_scenario",
    "derive_seed",
    "run_ensemble",
    "run_sweep",
    "SimSettings",
    # Exceptions
    "AsumanSimError",
    "InvalidArgumentError",
    "ConfigurationError",
    "ScenarioError",
    "SimulationStalledError",
    "InternalConsistencyError",
    # Observability
    "configure_otel",
    "setup_logging",
    "trace",
    "traced",
]
