"""Per-step and per-run verification of the provable discrete properties.

Monitors come in two tolerance classes: algebraic identities (mass balance,
oxygen range) are held to 1e-12, analytic bounds involving square roots of
configuration constants to 1e-9 relative. Violations are recorded, never
repaired; whether they abort a run is the orchestrator's strict/forced
policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .kernel import FloatArray, Mesh, ModelParams, SchemeConfig, State
from .transport import SourceCoeffs
from .velocity import (
    VelocityBounds,
    cellwise_velocity_gradient,
    stress_load,
    velocity_bounds,
)

if TYPE_CHECKING:
    from .orchestrator import CflReport, Trajectory

IDENTITY_TOL = 1e-12
BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class Violation:
    monitor: str
    step: int
    index: int | None
    value: float

    def describe(self) -> str:
        where = f" at index {self.index}" if self.index is not None else ""
        return f"step {self.step}: {self.monitor}{where} (value {self.value!r})"


@dataclass(frozen=True)
class StepDiagnostics:
    """Monitored quantities for one completed step."""

    n: int
    t: float
    mass_residual: float
    c_min: float
    c_max: float
    alpha_min_on_domain: float
    alpha_max: float
    u_inf_norm: float
    flux_bv: float
    alpha_space_bv: float
    radius: float
    radius_monotone_part: float
    alpha_time_l1: float
    oxygen_grad_energy: float
    violations: list[Violation] = field(default_factory=list)


@dataclass(frozen=True)
class RunSummary:
    """Aggregate verdicts for a whole trajectory."""

    steps: int
    termination: str
    max_mass_residual: float
    c_min: float
    c_max: float
    alpha_temporal_bv: float
    max_alpha_space_bv: float
    max_flux_bv: float
    oxygen_energy_sum: float
    radius_final: float
    radius_decomposition_pass: bool
    radius_decomposition_first_bad_step: int | None
    violations: list[Violation]


def mass_balance_residual(
    prev: State, next_state: State, coeffs: SourceCoeffs, config: SchemeConfig
) -> float:
    """Relative defect of the telescoping mass identity for one step.

    The flux terms cancel exactly (zero velocity at both ends of the box),
    so the step must satisfy

        h*sum(a^n) - h*sum(a^{n-1})
            = delta*h*sum((a^{n-1}-thr)^+ (1-a^{n-1}) b - (a^n-thr)^+ d)

    up to roundoff; the residual is normalised by the previous mass.
    """
    h = config.h
    thr = config.alpha_thr
    prev_mass = h * float(np.sum(prev.alpha))
    next_mass = h * float(np.sum(next_state.alpha))
    growth = np.maximum(prev.alpha - thr, 0.0) * (1.0 - prev.alpha) * coeffs.b
    death = np.maximum(next_state.alpha - thr, 0.0) * coeffs.d
    source = config.delta * h * float(np.sum(growth - death))
    return abs(next_mass - prev_mass - source) / max(prev_mass, 1e-30)


def bound_monitor(
    state: State,
    params: ModelParams,
    config: SchemeConfig,
    bounds: VelocityBounds | None = None,
    step: int = -1,
) -> list[Violation]:
    """Check the oxygen range, the volume-fraction bounds, and the velocity bound.

    Returns an empty list when every monitored quantity respects its bound.
    """
    if bounds is None:
        bounds = velocity_bounds(params, config)
    out: list[Violation] = []

    lo_idx = int(np.argmin(state.c))
    hi_idx = int(np.argmax(state.c))
    if state.c[lo_idx] < -IDENTITY_TOL:
        out.append(Violation("oxygen_range", step, lo_idx, float(state.c[lo_idx])))
    if state.c[hi_idx] > 1.0 + IDENTITY_TOL:
        out.append(Violation("oxygen_range", step, hi_idx, float(state.c[hi_idx])))

    slack_hi = BOUND_RTOL * max(1.0, config.a_star_hi)
    if state.radius_index > 0:
        dom = state.alpha[: state.radius_index]
        j_min = int(np.argmin(dom))
        j_max = int(np.argmax(dom))
        if dom[j_min] < config.a_star_lo - BOUND_RTOL * max(1.0, config.a_star_lo):
            out.append(Violation("alpha_domain_bounds", step, j_min, float(dom[j_min])))
        if dom[j_max] > config.a_star_hi + slack_hi:
            out.append(Violation("alpha_domain_bounds", step, j_max, float(dom[j_max])))

    g_min = int(np.argmin(state.alpha))
    g_max = int(np.argmax(state.alpha))
    if state.alpha[g_min] < -IDENTITY_TOL:
        out.append(Violation("alpha_global_bounds", step, g_min, float(state.alpha[g_min])))
    if state.alpha[g_max] > config.a_star_hi + slack_hi:
        out.append(Violation("alpha_global_bounds", step, g_max, float(state.alpha[g_max])))

    u_inf = float(np.max(np.abs(state.u)))
    if u_inf > bounds.u_max * (1.0 + BOUND_RTOL):
        out.append(Violation("velocity_bound", step, None, u_inf))
    return out


def convexity_monitor(
    u_prev: FloatArray, config: SchemeConfig, step: int = -1
) -> list[Violation]:
    """Check nonnegativity of the centre weight of the advective update.

    The transported value is a convex combination of the three neighbouring
    cells exactly when 1 - (delta/h)(u_{j+1}^- + u_j^+) >= 0 for every
    cell; losing that is the practical signature of a broken stability
    window.
    """
    r = config.ratio
    up = np.maximum(u_prev, 0.0)
    um = np.maximum(-u_prev, 0.0)
    centre = 1.0 - r * um[1:] - r * up[:-1]
    j = int(np.argmin(centre))
    if centre[j] < 0.0:
        return [Violation("cfl_convexity", step, j, float(centre[j]))]
    return []


def bv_norms(
    state: State, params: ModelParams, mesh: Mesh
) -> tuple[float, float]:
    """(spatial BV of the volume fraction, BV of the stress-flux combination).

    Both totals are taken over the whole box with the extended fields: the
    volume fraction includes its jumps against the zero extension at both
    ends, and the flux combination mu*a*u' - H(a) carries its zero value on
    cells outside the domain.
    """
    a = state.alpha
    alpha_bv = float(np.sum(np.abs(np.diff(a)))) + abs(float(a[0])) + abs(float(a[-1]))

    grad = cellwise_velocity_gradient(state.u, state.radius_index, mesh.h)
    flux = params.mu * a * grad - np.asarray(stress_load(a, params.alphaR))
    if state.radius_index < a.shape[0]:
        flux[state.radius_index:] = 0.0
    flux_bv = float(np.sum(np.abs(np.diff(flux))))
    return alpha_bv, flux_bv


def oxygen_gradient_energy(state: State, mesh: Mesh) -> float:
    """Squared L2 norm of the oxygen gradient over the recovered domain."""
    m = state.radius_index
    if m == 0:
        return 0.0
    d = np.diff(state.c[: m + 1]) / mesh.h
    return float(np.sum(d * d) * mesh.h)


def step_diagnostics(
    prev: State,
    state: State,
    coeffs: SourceCoeffs,
    params: ModelParams,
    config: SchemeConfig,
    mesh: Mesh,
    cfl: "CflReport",
    bounds: VelocityBounds,
    t: float,
    convexity: list[Violation] | None = None,
) -> StepDiagnostics:
    """Collect every per-step monitor for a completed transition prev -> state."""
    residual = mass_balance_residual(prev, state, coeffs, config)
    violations = bound_monitor(state, params, config, bounds, step=state.n)
    violations += (
        convexity if convexity is not None
        else convexity_monitor(prev.u, config, step=state.n)
    )
    if residual > IDENTITY_TOL:
        violations.append(Violation("mass_balance", state.n, None, residual))
    alpha_bv, flux_bv = bv_norms(state, params, mesh)
    radius = state.radius_index * mesh.h
    drift = t / cfl.lower if cfl.lower > 0.0 else 0.0
    dom = state.alpha[: state.radius_index]
    return StepDiagnostics(
        n=state.n,
        t=t,
        mass_residual=residual,
        c_min=float(np.min(state.c)),
        c_max=float(np.max(state.c)),
        alpha_min_on_domain=float(np.min(dom)) if dom.size else math.nan,
        alpha_max=float(np.max(state.alpha)),
        u_inf_norm=float(np.max(np.abs(state.u))),
        flux_bv=flux_bv,
        alpha_space_bv=alpha_bv,
        radius=radius,
        radius_monotone_part=radius - drift,
        alpha_time_l1=mesh.h * float(np.sum(np.abs(state.alpha - prev.alpha))),
        oxygen_grad_energy=config.delta * oxygen_gradient_energy(state, mesh),
        violations=violations,
    )


@dataclass(frozen=True)
class DecompositionVerdict:
    passed: bool
    first_bad_step: int | None


def radius_decomposition(trajectory: "Trajectory") -> DecompositionVerdict:
    """Verify that radius(t_n) - t_n/(rho*c_cfl) is nonincreasing over the run.

    Under a feasible stability window the domain can grow by at most one
    cell per step and h <= delta/(rho*c_cfl), so the drift-corrected radius
    must decrease monotonically; the first offending step is reported.
    """
    lower = trajectory.cfl.lower
    radii = trajectory.radius_series
    times = trajectory.times
    prev = math.inf
    for i in range(radii.shape[0]):
        drift = times[i] / lower if lower > 0.0 else 0.0
        value = radii[i] - drift
        if value > prev + 1e-12:
            return DecompositionVerdict(passed=False, first_bad_step=i)
        prev = value
    return DecompositionVerdict(passed=True, first_bad_step=None)


def extend_velocity_hat(state: State, mesh: Mesh) -> FloatArray:
    """Constant extension of the velocity beyond the domain (continuous variant)."""
    u_hat = state.u.copy()
    u_hat[state.radius_index + 1 :] = state.u[state.radius_index]
    return u_hat


def summarize(trajectory: "Trajectory") -> RunSummary:
    """Aggregate the per-step diagnostics of a trajectory."""
    steps = trajectory.step_diagnostics
    violations = [v for sd in steps for v in sd.violations]
    violations += list(getattr(trajectory, "aborted_violations", []))
    verdict = radius_decomposition(trajectory)
    if steps:
        max_residual = max(sd.mass_residual for sd in steps)
        c_min = min(sd.c_min for sd in steps)
        c_max = max(sd.c_max for sd in steps)
        max_alpha_bv = max(sd.alpha_space_bv for sd in steps)
        max_flux_bv = max(sd.flux_bv for sd in steps)
        temporal = sum(sd.alpha_time_l1 for sd in steps)
        energy = sum(sd.oxygen_grad_energy for sd in steps)
    else:
        max_residual = 0.0
        state = trajectory.final_state
        c_min = float(np.min(state.c)) if state is not None else math.nan
        c_max = float(np.max(state.c)) if state is not None else math.nan
        max_alpha_bv = 0.0
        max_flux_bv = 0.0
        temporal = 0.0
        energy = 0.0
    return RunSummary(
        steps=len(steps),
        termination=trajectory.termination,
        max_mass_residual=max_residual,
        c_min=c_min,
        c_max=c_max,
        alpha_temporal_bv=temporal,
        max_alpha_space_bv=max_alpha_bv,
        max_flux_bv=max_flux_bv,
        oxygen_energy_sum=energy,
        radius_final=float(trajectory.radius_series[-1])
        if trajectory.radius_series.size
        else trajectory.final_state.radius_index * trajectory.mesh.h
        if trajectory.final_state is not None
        else math.nan,
        radius_decomposition_pass=verdict.passed,
        radius_decomposition_first_bad_step=verdict.first_bad_step,
        violations=violations,
    )
