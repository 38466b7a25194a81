"""Explicit upwind finite-volume transport of the cell volume fraction.

Each step advances the cell averages with donor-cell fluxes built from the
previous level's nodal velocity, adds the thresholded growth term
explicitly, and absorbs the thresholded death term semi-implicitly (solved
in closed form per cell). The tumour radius is then recovered as the
smallest node beyond which every cell sits below the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainSaturated
from .kernel import FloatArray, ModelParams, SchemeConfig, State


@dataclass(frozen=True)
class SourceCoeffs:
    """Cell-wise growth factor b and death factor d (averages of the nodal rates)."""

    b: FloatArray
    d: FloatArray


def source_coeffs(c: FloatArray, params: ModelParams) -> SourceCoeffs:
    """Cell averages of the oxygen-dependent birth/death rates.

    b_j = avg of (1+s1)c/(1+s1 c) over the cell's two nodes, d_j likewise
    for (s2+s3 c)/(1+s4 c). For c in [0, 1]: 0 <= b <= 1 and 0 <= d <= s2.
    """
    c = np.asarray(c, dtype=np.float64)
    g = (1.0 + params.s1) * c / (1.0 + params.s1 * c)
    q = (params.s2 + params.s3 * c) / (1.0 + params.s4 * c)
    b = 0.5 * (g[:-1] + g[1:])
    d = 0.5 * (q[:-1] + q[1:])
    return SourceCoeffs(b=b, d=d)


def resolve_sink(K: float, d: float, delta: float, alpha_thr: float) -> float:
    """Solve alpha + delta*(alpha - alpha_thr)^+ * d = K for alpha.

    The left side is continuous, piecewise linear, and strictly increasing,
    so the solution is unique: alpha = K below the threshold, otherwise the
    linear branch (K + delta*d*alpha_thr)/(1 + delta*d).
    """
    if K <= alpha_thr:
        return K
    return (K + delta * d * alpha_thr) / (1.0 + delta * d)


def advance_alpha(prev: State, coeffs: SourceCoeffs, config: SchemeConfig) -> FloatArray:
    """One upwind step of the volume fraction.

    Per cell j the explicit part is

        K_j = a_j - (delta/h) * [u_{j+1}^+ a_j - u_{j+1}^- a_{j+1}
                                 - u_j^+ a_{j-1} + u_j^- a_j]
              + delta * (a_j - alpha_thr)^+ (1 - a_j) b_j,

    after which the implicit death term is resolved in closed form. The
    ghost value a_{-1} := a_0 is irrelevant because u_0 = 0, and the ghost
    cell on the right carries zero (u at the last node is zero by the
    extension convention, so it never contributes either).
    """
    alpha = prev.alpha
    u = prev.u
    r = config.delta / config.h

    up = np.maximum(u, 0.0)
    um = np.maximum(-u, 0.0)

    # Donor-cell flux at node j: F_j = u_j^+ a_{j-1} - u_j^- a_j.
    J = alpha.shape[0]
    flux = np.empty(J + 1, dtype=np.float64)
    flux[0] = up[0] * alpha[0] - um[0] * alpha[0]
    flux[1:J] = up[1:J] * alpha[: J - 1] - um[1:J] * alpha[1:]
    flux[J] = up[J] * alpha[J - 1]

    excess = np.maximum(alpha - config.alpha_thr, 0.0)
    growth = excess * (1.0 - alpha) * coeffs.b
    K = alpha - r * (flux[1:] - flux[:-1]) + config.delta * growth

    implicit = (K + config.delta * coeffs.d * config.alpha_thr) / (
        1.0 + config.delta * coeffs.d
    )
    return np.where(K <= config.alpha_thr, K, implicit)


def recover_radius(alpha: FloatArray, config: SchemeConfig) -> int:
    """Smallest cell count j such that every cell at or beyond j is below threshold.

    Returns 0 when the whole box is below threshold. Raises
    :class:`DomainSaturated` when the last cell is at or above it, because
    the recovered domain must stay strictly inside the bounding box.
    """
    above = np.flatnonzero(alpha >= config.alpha_thr)
    if above.size == 0:
        return 0
    last = int(above[-1])
    if last == alpha.shape[0] - 1:
        raise DomainSaturated(
            "volume fraction at or above threshold in the last cell of the bounding box"
        )
    return last + 1
