"""Exception types shared across the engine."""


class YauYauError(Exception):
    """Base class for all engine errors."""


class ConfigError(YauYauError):
    """Invalid experiment configuration.

    Carries a list of ``(field, message)`` pairs so callers (CLI, HTTP API)
    can report field-level problems.
    """

    def __init__(self, issues):
        self.issues = [(str(f), str(m)) for f, m in issues]
        super().__init__("; ".join(f"{f}: {m}" for f, m in self.issues))


class CapacityError(YauYauError):
    """Grid node count exceeds the configured budget."""


class SimulationError(YauYauError):
    """Non-finite drift/observation value during path simulation."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time


class StepFailureError(YauYauError):
    """A PDE step produced non-finite values."""

    def __init__(self, message, coarse_step=None, fine_step=None):
        super().__init__(message)
        self.coarse_step = coarse_step
        self.fine_step = fine_step


class DensityCollapseError(YauYauError):
    """Discrete density mass underflowed to zero (or went non-positive)."""

    def __init__(self, message, obs_index=None):
        super().__init__(message)
        self.obs_index = obs_index


class FilterCancelled(YauYauError):
    """Cooperative cancellation requested during a filter run."""


class OracleError(YauYauError):
    """An oracle filter hit an unrecoverable numerical condition."""


class StabilityWarning(UserWarning):
    """The explicit part of the PDE step may amplify (CFL-type guard)."""
