"""Exception hierarchy shared across the simulator.

The CLI maps these onto exit codes: ConfigError -> 2,
InfeasibleAllocationError -> 3, anything else under SimulationError -> 4.
"""


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SimulationError):
    """Invalid configuration document, field value, or CLI usage."""


class ThresholdOrderError(ConfigError):
    """Assignment thresholds out of order (requires x1 < x2)."""


class StepDomainError(SimulationError):
    """A denoising step count outside the model's admissible step set."""


class ResourceShareError(SimulationError):
    """A non-positive compute share (would divide by zero or flip sign)."""


class InfeasibleShareError(SimulationError):
    """A compute share exceeding the total edge budget."""


class ConstraintViolationError(SimulationError):
    """An allocation plan violating one of the problem constraints."""

    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


class InfeasibleAllocationError(SimulationError):
    """No feasible plan exists under the latency bound."""

    def __init__(self, message: str, binding: str = "latency"):
        self.binding = binding
        super().__init__(message)


class SearchSpaceError(SimulationError):
    """Exhaustive search space exceeds the safety guard; use a coarser grid."""


class ComparisonAborted(SimulationError):
    """A strategy bundle failed mid-comparison.

    Carries the reports completed before the failure so callers can
    inspect partial results.
    """

    def __init__(self, label: str, partial: dict, cause: Exception):
        self.label = label
        self.partial = partial
        self.cause = cause
        super().__init__(f"strategy {label!r} failed: {cause}")
