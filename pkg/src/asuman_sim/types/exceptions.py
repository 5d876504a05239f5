from typing import List, Optional, Sequence


class AsumanSimError(Exception):
    """Base simulator exception"""

    pass


class InvalidArgumentError(AsumanSimError, ValueError):
    """An operation was called outside its precondition."""

    pass


class ConfigurationError(AsumanSimError):
    """A network spec or run configuration failed validation."""

    def __init__(self, violations: Sequence[str], message: Optional[str] = None):
        self.violations: List[str] = list(violations)
        super().__init__(message or "invalid configuration: " + "; ".join(self.violations))


class ScenarioError(ConfigurationError):
    """A scenario document could not be parsed into a valid spec."""

    pass


class SimulationStalledError(AsumanSimError):
    """No event can fire: every rate is zero and no control point is pending."""

    def __init__(self, t: float):
        self.t = t
        super().__init__(f"simulation stalled at t={t:.6g}: total event rate is 0")


class InternalConsistencyError(AsumanSimError):
    pass
