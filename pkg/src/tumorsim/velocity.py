"""P1 finite-element solve of the cell velocity on the recovered domain.

The weak form on (0, radius) couples a weighted mass term k*(a/(1-a)) u v
with a weighted stiffness term mu*(a u' v'); the load is the stress
nonlinearity H(a) = a (a - alphaR)^+ / (1-a)^2 paired against v'. The
velocity vanishes at x=0 (eliminated unknown) and satisfies the stress
balance at the free boundary weakly through the load. Outside the domain
the velocity is extended by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoefficient
from .kernel import FloatArray, Mesh, ModelParams, SchemeConfig, solve_tridiagonal


@dataclass(frozen=True)
class VelocityBounds:
    """Closed-form a-priori bounds implied by the analysis constants.

    ``u_max`` bounds |u|; ``flux_grad_max`` bounds |mu*a*u'| and
    ``flux_grad_neg_max`` its negative part; ``bv_bound`` bounds the total
    variation of mu*a*u' - H(a).
    """

    u_max: float
    flux_grad_max: float
    flux_grad_neg_max: float
    bv_bound: float


def stress_load(alpha: float | FloatArray, alphaR: float) -> float | FloatArray:
    """Stress nonlinearity H(a) = a (a - alphaR)^+ / (1 - a)^2."""
    return alpha * np.maximum(alpha - alphaR, 0.0) / (1.0 - alpha) ** 2


def assemble_velocity_system(
    alpha: FloatArray,
    radius_index: int,
    params: ModelParams,
    mesh: Mesh,
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    """Assemble the tridiagonal system for the nodal velocities 1..radius_index.

    Each cell j < radius_index contributes, with r_j = a_j/(1-a_j), the
    exact 2x2 mass block k*h*r_j*[[1/3,1/6],[1/6,1/3]] plus the stiffness
    block mu*a_j/h*[[1,-1],[-1,1]]; node i of the load receives
    H(a_{i-1}) - H(a_i), with H := 0 on the first cell outside the domain.
    Returns (lower, diag, upper, rhs); lower and upper are equal because
    the system is symmetric.
    """
    if radius_index < 1:
        raise ValueError("assemble_velocity_system needs at least one interior cell")
    a = alpha[:radius_index]
    if np.any(a <= 0.0) or np.any(a >= 1.0):
        raise DegenerateCoefficient(
            "volume fraction must lie strictly inside (0, 1) on the tumour domain"
        )
    h = mesh.h
    r = a / (1.0 - a)
    cell_diag = params.k * h * r / 3.0 + params.mu * a / h
    cell_off = params.k * h * r / 6.0 - params.mu * a / h

    # Unknown p (0-based) is node p+1; node i sums the blocks of cells i-1, i.
    diag = cell_diag.copy()
    diag[:-1] += cell_diag[1:]
    off = cell_off[1:].copy()

    H = np.asarray(stress_load(a, params.alphaR), dtype=np.float64)
    rhs = H.copy()
    rhs[:-1] -= H[1:]
    return off.copy(), diag, off.copy(), rhs


def solve_velocity(
    alpha: FloatArray,
    radius_index: int,
    params: ModelParams,
    mesh: Mesh,
) -> FloatArray:
    """Nodal velocity with zero value at x=0 and zero extension beyond the domain."""
    u = np.zeros(mesh.J + 1, dtype=np.float64)
    if radius_index == 0:
        return u
    lower, diag, upper, rhs = assemble_velocity_system(alpha, radius_index, params, mesh)
    # Positive pivots certify positive definiteness of the symmetric system.
    u[1 : radius_index + 1] = solve_tridiagonal(
        lower, diag, upper, rhs, require_positive_pivots=True
    )
    return u


def velocity_bounds(params: ModelParams, config: SchemeConfig) -> VelocityBounds:
    """Evaluate the closed-form bounds at the configured analysis constants.

    The additive stress-supremum term uses the positive part of
    (a_star_hi - alphaR): the stress law vanishes identically below alphaR,
    so its supremum cannot be negative.
    """
    a_hi = config.a_star_hi
    a_lo = config.a_star_lo
    gap = abs(a_hi - params.alphaR)
    one_minus = abs(1.0 - a_hi)
    u_max = config.ellm * gap / (math.sqrt(a_lo) * params.mu * one_minus**2)
    bv = config.ellm * math.sqrt(params.k / params.mu) * gap / one_minus**2.5
    h_sup = a_hi * max(a_hi - params.alphaR, 0.0) / (1.0 - a_hi) ** 2
    return VelocityBounds(
        u_max=u_max,
        flux_grad_max=bv + h_sup,
        flux_grad_neg_max=bv,
        bv_bound=bv,
    )


def cellwise_velocity_gradient(u: FloatArray, radius_index: int, h: float) -> FloatArray:
    """Per-cell derivative of the extended velocity.

    The extension is discontinuous at the boundary node, so cells outside
    the domain carry gradient zero rather than a difference quotient.
    """
    grad = np.zeros(u.shape[0] - 1, dtype=np.float64)
    if radius_index > 0:
        grad[:radius_index] = (u[1 : radius_index + 1] - u[:radius_index]) / h
    return grad
