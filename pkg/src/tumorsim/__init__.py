"""Simulator for a one-dimensional two-phase tumour growth model.

Upwind finite-volume transport of the cell volume fraction, P1
finite-element cell velocity, and mass-lumped backward-Euler oxygen tension
on a fixed bounding box, with threshold-based recovery of the moving
tumour boundary, two-sided stability window checks, existence-horizon
calculators, and a diagnostics engine for the provable discrete
invariants.
"""

from .config import OutputOptions, ParsedConfig, parse_config
from .diagnostics import (
    RunSummary,
    StepDiagnostics,
    Violation,
    bound_monitor,
    bv_norms,
    convexity_monitor,
    extend_velocity_hat,
    mass_balance_residual,
    oxygen_gradient_energy,
    radius_decomposition,
    summarize,
)
from .errors import (
    CflInfeasible,
    ConfigError,
    DegenerateCoefficient,
    DomainSaturated,
    InvalidInitialData,
    MaximumPrincipleViolated,
    NonIntegerGrid,
    PreconditionViolated,
    SingularSystem,
    TumorSimError,
)
from .kernel import (
    Mesh,
    ModelParams,
    SchemeConfig,
    State,
    build_mesh,
    init_state,
    interpolate_linear,
    lump,
    solve_tridiagonal,
)
from .orchestrator import (
    CflReport,
    Horizon,
    HorizonRow,
    RefinementReport,
    RunOptions,
    Snapshot,
    Trajectory,
    existence_horizon,
    horizon_from_constants,
    initial_state,
    refinement_study,
    run,
    step,
    sweep_horizon,
    validate_cfl,
)
from .oxygen import OxygenSystem, assemble_oxygen_system, solve_oxygen
from .svgplot import render_svg
from .transport import (
    SourceCoeffs,
    advance_alpha,
    recover_radius,
    resolve_sink,
    source_coeffs,
)
from .velocity import (
    VelocityBounds,
    assemble_velocity_system,
    solve_velocity,
    velocity_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "CflInfeasible",
    "CflReport",
    "ConfigError",
    "DegenerateCoefficient",
    "DomainSaturated",
    "Horizon",
    "HorizonRow",
    "InvalidInitialData",
    "MaximumPrincipleViolated",
    "Mesh",
    "ModelParams",
    "NonIntegerGrid",
    "OutputOptions",
    "OxygenSystem",
    "ParsedConfig",
    "PreconditionViolated",
    "RefinementReport",
    "RunOptions",
    "RunSummary",
    "SchemeConfig",
    "SingularSystem",
    "Snapshot",
    "SourceCoeffs",
    "State",
    "StepDiagnostics",
    "Trajectory",
    "TumorSimError",
    "VelocityBounds",
    "Violation",
    "advance_alpha",
    "assemble_oxygen_system",
    "assemble_velocity_system",
    "bound_monitor",
    "build_mesh",
    "bv_norms",
    "convexity_monitor",
    "existence_horizon",
    "extend_velocity_hat",
    "horizon_from_constants",
    "init_state",
    "initial_state",
    "interpolate_linear",
    "lump",
    "mass_balance_residual",
    "oxygen_gradient_energy",
    "parse_config",
    "radius_decomposition",
    "recover_radius",
    "refinement_study",
    "render_svg",
    "resolve_sink",
    "run",
    "solve_oxygen",
    "solve_tridiagonal",
    "solve_velocity",
    "source_coeffs",
    "step",
    "summarize",
    "sweep_horizon",
    "validate_cfl",
    "velocity_bounds",
]
