"""Mesh construction, tridiagonal solves, lumping, interpolation, initial data."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tumorsim import (
    InvalidInitialData,
    NonIntegerGrid,
    SchemeConfig,
    SingularSystem,
    build_mesh,
    init_state,
    interpolate_linear,
    lump,
    solve_tridiagonal,
)
from tumorsim.kernel import nodal_l2_norm

from conftest import reference_config, small_config


class TestBuildMesh:
    def test_quarter_cells(self):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        assert mesh.J == 4
        np.testing.assert_array_equal(mesh.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_reference_cell_count(self):
        mesh = build_mesh(reference_config())
        assert mesh.J == 200

    def test_non_integer_grid_rejected(self):
        with pytest.raises((NonIntegerGrid, ValueError)):
            SchemeConfig(
                h=0.3, delta=0.01, ell0=0.9, ellm=1.0, alpha_thr=0.1, rho=0.1,
                a_star_lo=0.1, a_star_hi=0.9, m01=0.4, m02=0.8, T_final=1.0,
            )

    def test_nodes_generated_as_j_times_h(self):
        mesh = build_mesh(reference_config())
        np.testing.assert_array_equal(
            mesh.nodes, np.arange(mesh.J + 1) * mesh.h
        )


class TestSolveTridiagonal:
    def test_identity(self):
        x = solve_tridiagonal(
            np.zeros(2), np.ones(3), np.zeros(2), np.array([3.0, 4.0, 5.0])
        )
        np.testing.assert_array_equal(x, [3.0, 4.0, 5.0])

    def test_symmetric_2x2(self):
        x = solve_tridiagonal(
            np.array([1.0]), np.array([2.0, 2.0]), np.array([1.0]),
            np.array([3.0, 3.0]),
        )
        np.testing.assert_allclose(x, [1.0, 1.0], rtol=1e-14)

    def test_against_dense_oracle_8x8(self, rng):
        n = 8
        lower = rng.uniform(-1, 1, n - 1)
        upper = rng.uniform(-1, 1, n - 1)
        diag = 3.0 + rng.uniform(0, 1, n)
        rhs = rng.uniform(-5, 5, n)
        dense = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        expected = np.linalg.solve(dense, rhs)
        got = solve_tridiagonal(lower, diag, upper, rhs)
        np.testing.assert_allclose(got, expected, rtol=1e-12)

    def test_against_dense_oracle_sizes_to_50(self, rng):
        for n in (1, 2, 3, 5, 13, 27, 50):
            lower = rng.uniform(-1, 1, n - 1)
            upper = rng.uniform(-1, 1, n - 1)
            diag = 2.5 + rng.uniform(0, 1, n)
            rhs = rng.uniform(-5, 5, n)
            dense = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
            expected = np.linalg.solve(dense, rhs)
            got = solve_tridiagonal(lower, diag, upper, rhs)
            np.testing.assert_allclose(got, expected, rtol=1e-12)

    def test_singular_system_detected(self):
        with pytest.raises(SingularSystem):
            solve_tridiagonal(
                np.array([1.0]), np.array([1.0, 1.0]), np.array([1.0]),
                np.array([1.0, 1.0]),
            )

    def test_positive_pivot_requirement(self):
        # indefinite but nonsingular: pivots change sign
        with pytest.raises(SingularSystem):
            solve_tridiagonal(
                np.array([2.0]), np.array([1.0, 1.0]), np.array([2.0]),
                np.array([1.0, 1.0]), require_positive_pivots=True,
            )


class TestLumping:
    def test_constant_preserved(self, small_mesh):
        field = np.full(small_mesh.J + 1, 3.25)
        lumped = lump(field, small_mesh)
        assert np.all(lumped.values == 3.25)
        assert lumped.integral() == pytest.approx(3.25 * small_mesh.length, rel=1e-14)

    def test_integral_is_composite_trapezoid(self, small_mesh, rng):
        f = rng.uniform(-2, 2, small_mesh.J + 1)
        lumped = lump(f, small_mesh)
        h = small_mesh.h
        trapezoid = h * (f[0] / 2 + np.sum(f[1:-1]) + f[-1] / 2)
        assert lumped.integral() == pytest.approx(trapezoid, rel=1e-14, abs=1e-15)

    def test_interpolation_error_bound_on_sine(self):
        # ||f - lumped(f)||_L2 <= (h/2) ||f'||_L2 for f = sin on (0, 1)
        cfg = small_config(h=0.05, ellm=1.0, ell0=0.5, delta=1e-3)
        mesh = build_mesh(cfg)
        samples = np.sin(mesh.nodes)
        lumped = lump(samples, mesh)
        xs = np.linspace(0.0, 1.0, 20001)
        idx = np.clip(np.round(xs / mesh.h).astype(int), 0, mesh.J)
        err = np.sin(xs) - samples[idx]
        lhs = math.sqrt(np.trapezoid(err * err, xs))
        grad_norm = math.sqrt(np.trapezoid(np.cos(xs) ** 2, xs))
        assert lhs <= (mesh.h / 2.0) * grad_norm

    def test_norm_equivalence_random_fields(self, small_mesh, rng):
        # (1/sqrt(3)) ||lumped w|| <= ||w|| <= ||lumped w|| for P1 fields
        for _ in range(100):
            w = rng.uniform(-5, 5, small_mesh.J + 1)
            nodal = nodal_l2_norm(w, small_mesh.h)
            lumped = lump(w, small_mesh).norm_l2()
            assert lumped / math.sqrt(3.0) <= nodal * (1 + 1e-12)
            assert nodal <= lumped * (1 + 1e-12)

    def test_lump_of_interpolant_reproduces_nodal_values(self, small_mesh, rng):
        v = rng.uniform(-1, 1, small_mesh.J + 1)
        interp = interpolate_linear(v, small_mesh)
        nodal = np.array([interp(x) for x in small_mesh.nodes])
        lumped = lump(nodal, small_mesh)
        np.testing.assert_array_equal(lumped.values, v)


class TestInterpolateLinear:
    def test_reproduces_linear_functions(self, small_mesh):
        f = 0.7 + 1.3 * small_mesh.nodes
        interp = interpolate_linear(f, small_mesh)
        for x in np.linspace(0, small_mesh.length, 37):
            assert interp(float(x)) == pytest.approx(0.7 + 1.3 * x, rel=1e-14)

    def test_midpoint_is_average(self, small_mesh, rng):
        f = rng.uniform(-1, 1, small_mesh.J + 1)
        interp = interpolate_linear(f, small_mesh)
        mid = 0.5 * (small_mesh.nodes[2] + small_mesh.nodes[3])
        assert interp(float(mid)) == pytest.approx((f[2] + f[3]) / 2, rel=1e-14)

    def test_square_function_hand_value(self):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        interp = interpolate_linear(mesh.nodes**2, mesh)
        assert interp(0.125) == pytest.approx(0.03125, abs=1e-15)


class TestInitState:
    def test_constant_data(self):
        cfg = small_config(h=0.25, ellm=2.0, ell0=1.0, delta=0.01, m01=0.8, m02=0.8)
        mesh = build_mesh(cfg)
        state = init_state(lambda x: 0.8, lambda x: 1.0, cfg, mesh)
        np.testing.assert_allclose(
            state.alpha, [0.8, 0.8, 0.8, 0.8, 0.0, 0.0, 0.0, 0.0], atol=1e-15
        )
        assert np.all(state.c == 1.0)
        assert state.radius_index == 4
        assert np.all(state.u == 0.0)

    def test_polynomial_oxygen_sampled_with_boundary_forced(self):
        cfg = small_config(h=0.25, ellm=2.0, ell0=1.0, delta=0.01, m01=0.8, m02=0.8)
        mesh = build_mesh(cfg)
        state = init_state(lambda x: 0.8, lambda x: 1.0 - x * x / 2.0, cfg, mesh)
        inside = mesh.nodes[:4]
        np.testing.assert_allclose(state.c[:4], 1.0 - inside**2 / 2.0, rtol=1e-14)
        # the node at the initial radius carries the boundary value exactly
        assert np.all(state.c[4:] == 1.0)

    def test_linear_alpha_exact_cell_averages(self):
        cfg = small_config(h=0.5, ellm=2.0, ell0=1.0, delta=0.01, m01=0.7, m02=0.85)
        mesh = build_mesh(cfg)
        state = init_state(lambda x: 0.7 + 0.1 * x, lambda x: 1.0, cfg, mesh)
        assert state.alpha[0] == pytest.approx(0.725, abs=1e-15)
        assert state.alpha[1] == pytest.approx(0.775, abs=1e-15)
        assert np.all(state.alpha[2:] == 0.0)

    def test_alpha_outside_bounds_rejected(self):
        cfg = small_config(m01=0.4, m02=0.8)
        mesh = build_mesh(cfg)
        with pytest.raises(InvalidInitialData):
            init_state(lambda x: 0.95, lambda x: 1.0, cfg, mesh)

    def test_oxygen_outside_unit_interval_rejected(self):
        cfg = small_config(m01=0.4, m02=0.8)
        mesh = build_mesh(cfg)
        with pytest.raises(InvalidInitialData):
            init_state(lambda x: 0.5, lambda x: 1.5, cfg, mesh)


@given(
    diag_boost=st.floats(min_value=0.5, max_value=5.0),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
@settings(max_examples=50, deadline=None)
def test_tridiagonal_diagonally_dominant_property(diag_boost, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 51))
    lower = rng.uniform(-1, 1, n - 1)
    upper = rng.uniform(-1, 1, n - 1)
    diag = (2.0 + diag_boost) + rng.uniform(0, 1, n)
    rhs = rng.uniform(-10, 10, n)
    dense = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    expected = np.linalg.solve(dense, rhs)
    got = solve_tridiagonal(lower, diag, upper, rhs)
    np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-13)
