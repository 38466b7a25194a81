"""Exception hierarchy for the simulator.

All library errors derive from :class:`TumorSimError`. The time loop
annotates propagating errors with the step index at which they occurred.
"""

from __future__ import annotations


class TumorSimError(Exception):
    """Base class for all simulator errors."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message
        self.step: int | None = None
        # Populated by the time loop when a run aborts mid-flight, so the
        # diagnostics recorded before the failure stay reachable.
        self.trajectory = None

    def __str__(self) -> str:
        if self.step is not None:
            return f"[step {self.step}] {self.message}"
        return self.message


class NonIntegerGrid(TumorSimError):
    """Domain lengths are not integer multiples of the cell width."""


class SingularSystem(TumorSimError):
    """A tridiagonal elimination pivot fell below the singularity threshold."""


class InvalidInitialData(TumorSimError):
    """Initial volume fraction or oxygen data violates its admissible range."""


class DomainSaturated(TumorSimError):
    """The tumour reached the right end of the bounding box."""


class DegenerateCoefficient(TumorSimError):
    """A cell volume fraction left (0, 1) where the velocity solve needs it."""


class MaximumPrincipleViolated(TumorSimError):
    """Oxygen solve produced values outside [0, 1] beyond roundoff."""


class CflInfeasible(TumorSimError):
    """Time step / cell width violate the stability window and the run was not forced."""


class PreconditionViolated(TumorSimError):
    """Analysis constants violate the assumptions of the horizon formulas."""


class ConfigError(TumorSimError):
    """A configuration file is missing, malformed, or fails validation."""

    def __init__(self, key_path: str, reason: str):
        super().__init__(f"{key_path}: {reason}")
        self.key_path = key_path
        self.reason = reason
