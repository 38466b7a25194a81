"""Coupled time stepping, stability window, existence horizon, and sweeps.

A step advances the volume fraction with the previous level's velocity and
oxygen, recovers the tumour radius, and then solves the velocity and oxygen
systems on the new domain. Runs validate the two-sided stability window
first; forced runs may override it and keep going past monitor violations,
recording every outcome instead of aborting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import diagnostics as diag
from .errors import CflInfeasible, DomainSaturated, PreconditionViolated, TumorSimError
from .kernel import (
    FloatArray,
    Mesh,
    ModelParams,
    SchemeConfig,
    State,
    build_mesh,
    init_state,
)
from .oxygen import solve_oxygen
from .transport import advance_alpha, recover_radius, source_coeffs
from .velocity import solve_velocity, velocity_bounds


@dataclass(frozen=True)
class CflReport:
    """Outcome of the two-sided stability check.

    Feasibility requires rho*c_cfl <= delta/h <= c_cfl together with the
    absolute cap delta < min((1-rho)/s2, 2(1-rho)/(1+s2)). When the upper
    constant degenerates (analysis ceiling equal to the repulsion
    threshold), ``c_cfl`` is infinite, ``unbounded`` is set, and only the
    cap is enforced.
    """

    c_cfl: float
    ratio: float
    lower: float
    delta_cap: float
    feasible: bool
    unbounded: bool = False


@dataclass(frozen=True)
class Horizon:
    """Existence horizon and its three competing time scales."""

    F_min: float
    F_max: float
    T_m: float
    T_M: float
    T_ell: float
    T_star: float


@dataclass(frozen=True)
class Snapshot:
    n: int
    t: float
    state: State


@dataclass
class Trajectory:
    """A run: stored snapshots, per-step diagnostics, and the termination reason."""

    params: ModelParams
    config: SchemeConfig
    mesh: Mesh
    forced: bool
    cfl: CflReport
    snapshots: list[Snapshot] = field(default_factory=list)
    step_diagnostics: list[diag.StepDiagnostics] = field(default_factory=list)
    times: FloatArray = field(default_factory=lambda: np.zeros(0))
    radius_series: FloatArray = field(default_factory=lambda: np.zeros(0))
    final_state: State | None = None
    termination: str = "completed"
    # Violations of the transition that could not complete (saturation or a
    # hard error); they are knowable from the transition's inputs.
    aborted_violations: list[diag.Violation] = field(default_factory=list)


@dataclass(frozen=True)
class RunOptions:
    forced: bool = False
    snapshots: int = 10
    stop_at_horizon: bool = False


def validate_cfl(params: ModelParams, config: SchemeConfig) -> CflReport:
    """Evaluate the stability window for the configured discretisation."""
    gap = abs(config.a_star_hi - params.alphaR)
    delta_cap = min(
        (1.0 - config.rho) / params.s2,
        2.0 * (1.0 - config.rho) / (1.0 + params.s2),
    )
    ratio = config.ratio
    if gap == 0.0:
        return CflReport(
            c_cfl=math.inf,
            ratio=ratio,
            lower=0.0,
            delta_cap=delta_cap,
            feasible=config.delta < delta_cap,
            unbounded=True,
        )
    c_cfl = (
        math.sqrt(config.a_star_lo)
        * params.mu
        * abs(1.0 - config.a_star_hi) ** 2
        / (2.0 * config.ellm * gap)
    )
    lower = config.rho * c_cfl
    feasible = lower <= ratio <= c_cfl and config.delta < delta_cap
    return CflReport(
        c_cfl=c_cfl, ratio=ratio, lower=lower, delta_cap=delta_cap, feasible=feasible
    )


def horizon_from_constants(
    params: ModelParams,
    ellm: float,
    ell0: float,
    alpha_thr: float,
    rho: float,
    a_star_lo: float,
    a_star_hi: float,
    m02: float,
) -> Horizon:
    """Existence horizon for explicit analysis constants.

    ``T_m`` is the time before the interior lower bound can be lost,
    ``T_M`` the time before the upper bound can be lost, and ``T_ell`` the
    time before the domain could reach the bounding box; the horizon is
    their minimum. As in the velocity bounds, the stress-supremum term of
    ``F_min`` uses a positive part, so it vanishes when the ceiling sits at
    or below the repulsion threshold.
    """
    if not 0.0 < a_star_lo < alpha_thr:
        raise PreconditionViolated(
            f"a_star_lo={a_star_lo!r} must lie in (0, alpha_thr={alpha_thr!r})"
        )
    if not 0.0 < m02 < a_star_hi < 1.0:
        raise PreconditionViolated(
            f"need 0 < m02={m02!r} < a_star_hi={a_star_hi!r} < 1"
        )
    gap = abs(a_star_hi - params.alphaR)
    one_minus = abs(1.0 - a_star_hi)
    bv = ellm * math.sqrt(params.k) / params.mu**1.5 * gap / one_minus**2.5
    h_sup = a_star_hi * max(a_star_hi - params.alphaR, 0.0) / (
        params.mu * (1.0 - a_star_hi) ** 2
    )
    F_min = bv + h_sup
    T_m = (1.0 / params.s2) * math.log(
        (F_min + params.s2 * alpha_thr) / (F_min + a_star_lo * params.s2)
    )
    F_max = 1.0 - alpha_thr + bv / a_star_lo
    T_M = (a_star_hi - m02) / F_max
    if gap == 0.0:
        T_ell = math.inf
    else:
        c_cfl = math.sqrt(a_star_lo) * params.mu * one_minus**2 / (2.0 * ellm * gap)
        T_ell = rho * c_cfl * (ellm - ell0)
    return Horizon(
        F_min=F_min,
        F_max=F_max,
        T_m=T_m,
        T_M=T_M,
        T_ell=T_ell,
        T_star=min(T_m, T_M, T_ell),
    )


def existence_horizon(params: ModelParams, config: SchemeConfig) -> Horizon:
    """Existence horizon at the configured analysis constants."""
    return horizon_from_constants(
        params,
        config.ellm,
        config.ell0,
        config.alpha_thr,
        config.rho,
        config.a_star_lo,
        config.a_star_hi,
        config.m02,
    )


@dataclass(frozen=True)
class HorizonRow:
    a_star_lo: float
    a_star_hi: float
    m02: float
    horizon: Horizon


def sweep_horizon(
    params: ModelParams,
    config: SchemeConfig,
    grid: dict[str, Sequence[float]],
) -> list[HorizonRow]:
    """Tabulate the horizon over a Cartesian grid of analysis constants.

    ``grid`` maps any of ``a_star_lo``, ``a_star_hi``, ``m02`` to value
    sequences; omitted axes stay at the configured value. Grid points that
    violate the horizon preconditions are skipped (absent rows).
    """
    allowed = {"a_star_lo", "a_star_hi", "m02"}
    unknown = set(grid) - allowed
    if unknown:
        raise ValueError(f"unknown sweep axes: {sorted(unknown)}")
    los = grid.get("a_star_lo", [config.a_star_lo])
    his = grid.get("a_star_hi", [config.a_star_hi])
    m02s = grid.get("m02", [config.m02])

    rows: list[HorizonRow] = []
    for lo in los:
        for hi in his:
            for m02 in m02s:
                try:
                    hz = horizon_from_constants(
                        params,
                        config.ellm,
                        config.ell0,
                        config.alpha_thr,
                        config.rho,
                        float(lo),
                        float(hi),
                        float(m02),
                    )
                except PreconditionViolated:
                    continue
                rows.append(
                    HorizonRow(
                        a_star_lo=float(lo),
                        a_star_hi=float(hi),
                        m02=float(m02),
                        horizon=hz,
                    )
                )
    return rows


def initial_state(
    alpha0: Callable[[float], float],
    c0: Callable[[float], float],
    params: ModelParams,
    config: SchemeConfig,
    mesh: Mesh,
) -> State:
    """Initial data plus the velocity obtained from the elliptic solve at n=0."""
    state = init_state(alpha0, c0, config, mesh)
    u0 = solve_velocity(state.alpha, state.radius_index, params, mesh)
    return replace(state, u=u0)


def step(state: State, params: ModelParams, config: SchemeConfig, mesh: Mesh) -> State:
    """Advance one time level: transport, radius recovery, velocity, oxygen."""
    n = state.n + 1
    try:
        coeffs = source_coeffs(state.c, params)
        alpha = advance_alpha(state, coeffs, config)
        radius_index = recover_radius(alpha, config)
        u = solve_velocity(alpha, radius_index, params, mesh)
        c = solve_oxygen(alpha, state.c, radius_index, params, config, mesh)
    except TumorSimError as err:
        if err.step is None:
            err.step = n
        raise
    return State(n=n, alpha=alpha, u=u, c=c, radius_index=radius_index)


def run(
    params: ModelParams,
    config: SchemeConfig,
    alpha0: Callable[[float], float],
    c0: Callable[[float], float],
    options: RunOptions = RunOptions(),
) -> Trajectory:
    """Run the coupled scheme to T_final, collecting diagnostics every step.

    Strict runs stop at the first monitor violation (recorded, not raised);
    forced runs record violations and continue. A saturated bounding box
    always ends the run with its own termination reason. Hard numerical
    errors propagate with the step index attached.
    """
    mesh = build_mesh(config)
    report = validate_cfl(params, config)
    if not report.feasible and not options.forced:
        raise CflInfeasible(
            f"delta/h={report.ratio!r} outside [{report.lower!r}, {report.c_cfl!r}] "
            f"or delta >= {report.delta_cap!r}; pass forced=True to override"
        )

    horizon_t: float | None = None
    if options.stop_at_horizon:
        horizon_t = existence_horizon(params, config).T_star

    n_steps = int(math.floor(config.T_final / config.delta + 1e-9))
    snap_steps = _snapshot_steps(n_steps, options.snapshots)

    traj = Trajectory(
        params=params, config=config, mesh=mesh, forced=options.forced, cfl=report
    )
    state = initial_state(alpha0, c0, params, config, mesh)
    bounds = velocity_bounds(params, config)
    times = [0.0]
    radii = [state.radius_index * mesh.h]
    if 0 in snap_steps:
        traj.snapshots.append(Snapshot(n=0, t=0.0, state=state))

    try:
        for n in range(1, n_steps + 1):
            t = n * config.delta
            if horizon_t is not None and t > horizon_t:
                traj.termination = "horizon reached"
                break
            prev = state
            coeffs = source_coeffs(prev.c, params)
            convexity = diag.convexity_monitor(prev.u, config, step=n)
            try:
                state = step(prev, params, config, mesh)
            except DomainSaturated:
                traj.termination = "domain saturated"
                traj.aborted_violations = convexity
                break
            except TumorSimError:
                traj.aborted_violations = convexity
                raise

            sd = diag.step_diagnostics(
                prev, state, coeffs, params, config, mesh, report, bounds, t,
                convexity,
            )
            traj.step_diagnostics.append(sd)
            times.append(t)
            radii.append(state.radius_index * mesh.h)
            if n in snap_steps:
                traj.snapshots.append(Snapshot(n=n, t=t, state=state))

            if sd.violations and not options.forced:
                traj.termination = "invariant violation"
                break
    except TumorSimError as err:
        # Hard numerical errors abort even forced runs; keep what was
        # recorded so far reachable for post-mortem inspection.
        traj.termination = "aborted"
        err.trajectory = traj
        raise
    finally:
        if traj.snapshots and traj.snapshots[-1].n != state.n:
            traj.snapshots.append(
                Snapshot(n=state.n, t=state.n * config.delta, state=state)
            )
        traj.final_state = state
        traj.times = np.asarray(times)
        traj.radius_series = np.asarray(radii)
    return traj


def _snapshot_steps(n_steps: int, count: int) -> set[int]:
    """Uniformly spaced snapshot indices (count of them) plus the final step."""
    if n_steps == 0 or count <= 0:
        return {0}
    steps = {(i * n_steps) // count for i in range(count)}
    steps.add(n_steps)
    return steps


@dataclass(frozen=True)
class RefinementLevel:
    h: float
    delta: float
    steps: int
    alpha_final: FloatArray
    spatial_bv_final: float
    temporal_bv_sum: float
    oxygen_energy_sum: float


@dataclass(frozen=True)
class RefinementReport:
    levels: list[RefinementLevel]
    l1_differences: list[float]


def refinement_study(
    params: ModelParams,
    config: SchemeConfig,
    alpha0: Callable[[float], float],
    c0: Callable[[float], float],
    n_levels: int,
    options: RunOptions = RunOptions(),
) -> RefinementReport:
    """Rerun the scheme on successively halved (h, delta) at a fixed ratio.

    Reports, per level, the final volume fraction and the BV/energy
    monitors, plus the L1 distance between consecutive final volume
    fractions (the coarse field injected onto the finer grid).
    """
    if n_levels < 1:
        raise ValueError("need at least one level")
    levels: list[RefinementLevel] = []
    for k in range(n_levels):
        cfg = replace(config, h=config.h / 2**k, delta=config.delta / 2**k)
        traj = run(params, cfg, alpha0, c0, options)
        summary = diag.summarize(traj)
        assert traj.final_state is not None
        levels.append(
            RefinementLevel(
                h=cfg.h,
                delta=cfg.delta,
                steps=len(traj.step_diagnostics),
                alpha_final=traj.final_state.alpha,
                spatial_bv_final=traj.step_diagnostics[-1].alpha_space_bv
                if traj.step_diagnostics
                else 0.0,
                temporal_bv_sum=summary.alpha_temporal_bv,
                oxygen_energy_sum=summary.oxygen_energy_sum,
            )
        )
    diffs = [
        _l1_between_levels(levels[k].alpha_final, levels[k + 1].alpha_final,
                           levels[k + 1].h)
        for k in range(n_levels - 1)
    ]
    return RefinementReport(levels=levels, l1_differences=diffs)


def _l1_between_levels(coarse: FloatArray, fine: FloatArray, h_fine: float) -> float:
    """L1 distance between piecewise constants on nested grids."""
    factor = fine.shape[0] // coarse.shape[0]
    injected = np.repeat(coarse, factor)
    return float(h_fine * np.sum(np.abs(fine - injected)))
