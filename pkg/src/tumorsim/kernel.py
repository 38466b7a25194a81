"""Meshing, field containers, shared numerical kernels, and initial data.

Conventions used throughout the package:

* The bounding box ``(0, ellm)`` is split into ``J = ellm/h`` uniform cells
  ``X_j = (x_j, x_{j+1})`` with nodes ``x_j = j*h``.
* A *cell field* is a length-``J`` float array (piecewise constant per cell);
  a *nodal field* is a length-``J+1`` float array (continuous piecewise
  linear, one value per node).
* The mass-lumping operator replaces a nodal field by a piecewise constant
  on node-centred intervals of width ``h`` (``h/2`` at both ends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInitialData, NonIntegerGrid, SingularSystem

FloatArray = NDArray[np.float64]

# Relative tolerance for "this length is an integer multiple of h" checks.
GRID_RTOL = 1e-12

# 3-point Gauss-Legendre rule on [-1, 1]; exact for quintics, used for cell
# averages of the initial volume fraction.
_GL3_POINTS = np.array([-math.sqrt(3.0 / 5.0), 0.0, math.sqrt(3.0 / 5.0)])
_GL3_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the two-phase growth model.

    ``k`` is the cell/fluid traction coefficient, ``mu`` the cell-phase
    viscosity, ``lam`` the oxygen diffusivity, ``Q``/``Q1hat`` the oxygen
    consumption rate and saturation, ``s1..s4`` the birth/death rate
    constants, and ``alphaR`` the repulsion threshold of the stress law.
    """

    k: float
    mu: float
    lam: float
    Q: float
    Q1hat: float
    s1: float
    s2: float
    s3: float
    s4: float
    alphaR: float

    def __post_init__(self) -> None:
        for name in ("k", "mu", "lam", "Q", "Q1hat", "s1", "s2", "s3", "s4", "alphaR"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"ModelParams.{name} must be finite, got {v!r}")
        for name in ("k", "mu", "lam", "s1", "s2", "s3", "s4"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"ModelParams.{name} must be positive")
        if self.Q < 0.0 or self.Q1hat < 0.0:
            raise ValueError("ModelParams.Q and Q1hat must be nonnegative")
        if not 0.0 < self.alphaR < 1.0:
            raise ValueError("ModelParams.alphaR must lie in (0, 1)")


@dataclass(frozen=True)
class SchemeConfig:
    """Discretisation and threshold-analysis constants.

    ``a_star_lo``/``a_star_hi`` are the analysis bounds on the volume
    fraction, ``m01``/``m02`` the bounds satisfied by the initial data,
    ``alpha_thr`` the domain-recovery threshold, and ``rho`` the lower
    fraction of the stability window.
    """

    h: float
    delta: float
    ell0: float
    ellm: float
    alpha_thr: float
    rho: float
    a_star_lo: float
    a_star_hi: float
    m01: float
    m02: float
    T_final: float

    def __post_init__(self) -> None:
        if self.h <= 0.0 or self.delta <= 0.0:
            raise ValueError("h and delta must be positive")
        if not 0.0 < self.ell0 < self.ellm:
            raise ValueError("need 0 < ell0 < ellm")
        _integer_multiple(self.ellm, self.h, "ellm")
        _integer_multiple(self.ell0, self.h, "ell0")
        if not 0.0 < self.alpha_thr < 1.0:
            raise ValueError("alpha_thr must lie in (0, 1)")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if not (0.0 < self.a_star_lo <= self.m01 <= self.m02 <= self.a_star_hi < 1.0):
            raise ValueError("need 0 < a_star_lo <= m01 <= m02 <= a_star_hi < 1")
        if self.T_final < 0.0:
            raise ValueError("T_final must be nonnegative")

    @property
    def ratio(self) -> float:
        """Time step over cell width."""
        return self.delta / self.h


def _integer_multiple(length: float, h: float, name: str) -> int:
    """Return length/h as an int, raising NonIntegerGrid when it is not one."""
    raw = length / h
    n = round(raw)
    if n < 1 or abs(raw - n) > GRID_RTOL * max(1.0, abs(raw)):
        raise NonIntegerGrid(f"{name}={length!r} is not an integer multiple of h={h!r}")
    return int(n)


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh of the bounding box: J cells, J+1 nodes at j*h."""

    J: int
    h: float
    nodes: FloatArray

    @property
    def length(self) -> float:
        return float(self.nodes[-1])

    def cell_centers(self) -> FloatArray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])


def build_mesh(config: SchemeConfig) -> Mesh:
    """Build the uniform mesh with J = ellm/h cells; nodes are generated as j*h."""
    J = _integer_multiple(config.ellm, config.h, "ellm")
    _integer_multiple(config.ell0, config.h, "ell0")
    nodes = np.arange(J + 1, dtype=np.float64) * config.h
    return Mesh(J=J, h=config.h, nodes=nodes)


@dataclass(frozen=True)
class State:
    """One time level of the discrete solution.

    ``alpha`` is the cell volume fraction (cell field), ``u`` the cell
    velocity and ``c`` the oxygen tension (nodal fields), ``radius_index``
    the number of cells inside the recovered tumour domain (its right edge
    sits at ``radius_index * h``). Extension conventions: ``u`` is zero and
    ``c`` is one outside the domain.
    """

    n: int
    alpha: FloatArray
    u: FloatArray
    c: FloatArray
    radius_index: int

    def validate(self, mesh: Mesh) -> None:
        """Check container shapes and the extension conventions (test helper)."""
        J = mesh.J
        assert self.alpha.shape == (J,)
        assert self.u.shape == (J + 1,)
        assert self.c.shape == (J + 1,)
        assert 0 <= self.radius_index <= J
        assert self.u[0] == 0.0
        assert np.all(self.u[self.radius_index + 1:] == 0.0)
        assert np.all(self.c[self.radius_index:] == 1.0)


def solve_tridiagonal(
    lower: FloatArray,
    diag: FloatArray,
    upper: FloatArray,
    rhs: FloatArray,
    require_positive_pivots: bool = False,
) -> FloatArray:
    """Solve a tridiagonal system by forward elimination / back substitution.

    ``lower`` and ``upper`` have length ``n-1`` for a system of size ``n``.
    Raises :class:`SingularSystem` when an elimination pivot falls below
    ``1e-14`` times the largest coefficient magnitude. With
    ``require_positive_pivots`` a nonpositive pivot also raises, which makes
    the call double as a positive-definiteness check for symmetric systems.
    """
    n = len(diag)
    if n < 1:
        raise ValueError("empty system")
    if len(lower) != n - 1 or len(upper) != n - 1 or len(rhs) != n:
        raise ValueError("inconsistent band lengths")

    scale = max(
        float(np.max(np.abs(diag))),
        float(np.max(np.abs(lower))) if n > 1 else 0.0,
        float(np.max(np.abs(upper))) if n > 1 else 0.0,
    )
    floor = 1e-14 * scale

    # Plain Python floats keep the sequential recurrence fast; numpy scalar
    # indexing in this loop costs ~5x more.
    lo = lower.tolist()
    di = diag.tolist()
    up = upper.tolist()
    y = rhs.tolist()

    gamma = [0.0] * (n - 1)
    piv = di[0]
    if abs(piv) <= floor or (require_positive_pivots and piv <= 0.0):
        raise SingularSystem(f"pivot {piv!r} at row 0 below threshold {floor!r}")
    y[0] = y[0] / piv
    for i in range(1, n):
        gamma[i - 1] = up[i - 1] / piv
        piv = di[i] - lo[i - 1] * gamma[i - 1]
        if abs(piv) <= floor or (require_positive_pivots and piv <= 0.0):
            raise SingularSystem(f"pivot {piv!r} at row {i} below threshold {floor!r}")
        y[i] = (y[i] - lo[i - 1] * y[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        y[i] -= gamma[i] * y[i + 1]
    return np.asarray(y, dtype=np.float64)


@dataclass(frozen=True)
class LumpedField:
    """Piecewise constant on node-centred intervals: values[j] on x_j +/- h/2.

    The two boundary intervals are half width. ``weights`` holds the interval
    measures, so integrals are plain dot products.
    """

    values: FloatArray
    weights: FloatArray

    def integral(self) -> float:
        return float(self.values @ self.weights)

    def norm_l2(self) -> float:
        return math.sqrt(float((self.values * self.values) @ self.weights))


def lump(values: FloatArray, mesh: Mesh) -> LumpedField:
    """Mass-lump a nodal field onto node-centred piecewise constants."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (mesh.J + 1,):
        raise ValueError("expected one value per node")
    weights = np.full(mesh.J + 1, mesh.h, dtype=np.float64)
    weights[0] = 0.5 * mesh.h
    weights[-1] = 0.5 * mesh.h
    return LumpedField(values=values.copy(), weights=weights)


def interpolate_linear(samples: FloatArray, mesh: Mesh) -> Callable[[float], float]:
    """Return the continuous piecewise-linear interpolant of nodal samples.

    Evaluation clamps to the mesh interval; nodal values reproduce the
    samples exactly and linear functions are reproduced everywhere.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (mesh.J + 1,):
        raise ValueError("expected one sample per node")
    frozen = samples.copy()

    def evaluate(x: float) -> float:
        s = min(max(x / mesh.h, 0.0), float(mesh.J))
        j = min(int(s), mesh.J - 1)
        t = s - j
        return float(frozen[j] * (1.0 - t) + frozen[j + 1] * t)

    return evaluate


def nodal_l2_norm(values: FloatArray, h: float) -> float:
    """Exact L2 norm of the piecewise-linear function with given nodal values."""
    a = values[:-1]
    b = values[1:]
    return math.sqrt(float(np.sum(h * (a * a + a * b + b * b) / 3.0)))


def init_state(
    alpha0: Callable[[float], float],
    c0: Callable[[float], float],
    config: SchemeConfig,
    mesh: Mesh,
) -> State:
    """Construct the initial discrete state from continuous data.

    The volume fraction is cell-averaged (3-point Gauss-Legendre) on
    ``(0, ell0)`` and zero beyond; the oxygen tension is sampled at nodes,
    forced to exactly one at ``ell0`` and extended by one beyond. The
    velocity is left at zero; the caller derives it from the elliptic solve.
    """
    J0 = _integer_multiple(config.ell0, config.h, "ell0")
    h = mesh.h

    alpha = np.zeros(mesh.J, dtype=np.float64)
    for j in range(J0):
        xs = (mesh.nodes[j] + mesh.nodes[j + 1]) / 2.0 + (h / 2.0) * _GL3_POINTS
        vals = np.array([alpha0(float(x)) for x in xs])
        if np.any(vals < config.m01 - 1e-12) or np.any(vals > config.m02 + 1e-12):
            raise InvalidInitialData(
                f"alpha0 leaves [{config.m01}, {config.m02}] on cell {j}"
            )
        alpha[j] = 0.5 * float(_GL3_WEIGHTS @ vals)

    c = np.ones(mesh.J + 1, dtype=np.float64)
    for j in range(J0):
        v = c0(float(mesh.nodes[j]))
        if not -1e-12 <= v <= 1.0 + 1e-12:
            raise InvalidInitialData(f"c0 leaves [0, 1] at node {j}")
        c[j] = v
    # Node J0 carries the boundary value 1 regardless of c0(ell0): the
    # Dirichlet condition and the unit extension must agree at the seam.

    u = np.zeros(mesh.J + 1, dtype=np.float64)
    return State(n=0, alpha=alpha, u=u, c=c, radius_index=J0)
