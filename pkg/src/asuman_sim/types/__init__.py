from .exceptions import (
    AsumanSimError,
    ConfigurationError,
    InternalConsistencyError,
    InvalidArgumentError,
    ScenarioError,
    SimulationStalledError,
)
from .network import (
    HEAD_POLICY_FOR_LINKS,
    AgeVector,
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
    is_frozen,
    is_opportunistic,
    policy_label,
)
from .results import (
    BoundKind,
    BoundReport,
    CriterionResult,
    EnsembleStatistics,
    RecurrenceEstimate,
    RunStatistics,
    ScalingFit,
)
