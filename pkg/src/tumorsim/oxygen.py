"""Backward-Euler, mass-lumped P1 solve of the oxygen tension.

On the recovered domain the oxygen satisfies a diffusion equation with a
lumped consumption term, a homogeneous Neumann condition at x=0, the
Dirichlet value one at the moving boundary (handled by elimination), and
unit extension outside. Lumping makes the reaction and mass matrices
diagonal, which together with the M-matrix structure of the stiffness
yields a discrete maximum principle: the solve stays in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MaximumPrincipleViolated
from .kernel import FloatArray, Mesh, ModelParams, SchemeConfig, solve_tridiagonal

# Roundoff allowance when asserting the maximum principle; anything larger
# signals an assembly bug rather than a model state.
MAX_PRINCIPLE_TOL = 1e-12


@dataclass(frozen=True)
class OxygenSystem:
    """Matrix blocks for the unknowns at nodes 0..radius_index-1.

    ``M_diag`` is the lumped mass (node-centred cell measures: h/2 at node
    0, h at interior nodes), ``D_*`` the P1 stiffness bands with the Neumann
    first row, ``S_diag`` the lumped reaction diagonal, and ``b`` the
    Dirichlet-lift load whose only nonzero entry is -lam/h at the last
    unknown. The solve is (M + delta*lam*D + Q*delta*S) c = M c_prev - delta*b.
    """

    M_diag: FloatArray
    D_lower: FloatArray
    D_diag: FloatArray
    D_upper: FloatArray
    S_diag: FloatArray
    b: FloatArray


def assemble_oxygen_system(
    alpha: FloatArray,
    c_prev: FloatArray,
    radius_index: int,
    params: ModelParams,
    config: SchemeConfig,
    mesh: Mesh,
) -> OxygenSystem:
    """Assemble the lumped backward-Euler system on nodes 0..radius_index-1.

    The reaction diagonal is the closed form of the half-cell averages of
    the lumped basis products: S_0 = (h a_0/4)/(1 + Q1hat|c_prev_0|) and
    S_i = (h (a_{i-1}+a_i)/4)/(1 + Q1hat|c_prev_i|) at interior nodes.
    """
    if radius_index < 1:
        raise ValueError("assemble_oxygen_system needs at least one unknown")
    h = mesh.h
    m = radius_index

    M_diag = np.full(m, h, dtype=np.float64)
    M_diag[0] = 0.5 * h

    D_diag = np.full(m, 2.0 / h, dtype=np.float64)
    D_diag[0] = 1.0 / h
    D_lower = np.full(m - 1, -1.0 / h, dtype=np.float64)
    D_upper = D_lower.copy()

    sat = 1.0 + params.Q1hat * np.abs(c_prev[:m])
    pair = np.empty(m, dtype=np.float64)
    pair[0] = alpha[0]
    pair[1:] = alpha[: m - 1] + alpha[1:m]
    S_diag = (h * pair / 4.0) / sat

    b = np.zeros(m, dtype=np.float64)
    b[-1] = -params.lam / h
    return OxygenSystem(
        M_diag=M_diag,
        D_lower=D_lower,
        D_diag=D_diag,
        D_upper=D_upper,
        S_diag=S_diag,
        b=b,
    )


def solve_oxygen(
    alpha: FloatArray,
    c_prev: FloatArray,
    radius_index: int,
    params: ModelParams,
    config: SchemeConfig,
    mesh: Mesh,
) -> FloatArray:
    """Advance the oxygen tension one step; unit value at and beyond the boundary.

    Off-diagonal entries of the assembled matrix are nonpositive and every
    row is strictly diagonally dominant, so the inverse is positive and the
    output provably stays in [0, 1] whenever alpha >= 0 and c_prev lies in
    [0, 1]; the bound is asserted, never clamped.
    """
    c = np.ones(mesh.J + 1, dtype=np.float64)
    if radius_index == 0:
        return c
    sysm = assemble_oxygen_system(alpha, c_prev, radius_index, params, config, mesh)

    dl = config.delta * params.lam
    diag = sysm.M_diag + dl * sysm.D_diag + params.Q * config.delta * sysm.S_diag
    lower = dl * sysm.D_lower
    upper = dl * sysm.D_upper
    if lower.size and (np.any(lower > 0.0) or np.any(upper > 0.0)):
        raise AssertionError("oxygen matrix lost its nonpositive off-diagonal structure")
    dominance = diag.copy()
    if lower.size:
        dominance[1:] -= np.abs(lower)
        dominance[:-1] -= np.abs(upper)
    if np.any(dominance <= 0.0):
        raise AssertionError("oxygen matrix lost strict diagonal dominance")

    rhs = sysm.M_diag * c_prev[:radius_index] - config.delta * sysm.b
    sol = solve_tridiagonal(lower, diag, upper, rhs, require_positive_pivots=True)

    lo = float(np.min(sol))
    hi = float(np.max(sol))
    if lo < -MAX_PRINCIPLE_TOL or hi > 1.0 + MAX_PRINCIPLE_TOL:
        raise MaximumPrincipleViolated(
            f"oxygen solve left [0, 1]: range [{lo!r}, {hi!r}]"
        )
    c[:radius_index] = sol
    return c
