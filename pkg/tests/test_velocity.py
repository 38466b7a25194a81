"""Velocity assembly/solve against dense oracles; closed-form bound values."""

import math

import numpy as np
import pytest

from tumorsim import (
    DegenerateCoefficient,
    assemble_velocity_system,
    build_mesh,
    solve_velocity,
    velocity_bounds,
)
from tumorsim.velocity import cellwise_velocity_gradient, stress_load

from conftest import reference_config, reference_params, small_config


def dense_velocity_oracle(alpha, radius_index, params, h):
    """Per-element dense assembly with the Dirichlet node eliminated."""
    m = radius_index
    A = np.zeros((m + 1, m + 1))
    rhs = np.zeros(m + 1)
    for j in range(m):
        r = alpha[j] / (1.0 - alpha[j])
        mass = params.k * h * r * np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
        stiff = params.mu * alpha[j] / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
        A[j : j + 2, j : j + 2] += mass + stiff
        H = float(stress_load(alpha[j], params.alphaR))
        rhs[j] -= H
        rhs[j + 1] += H
    return A[1:, 1:], rhs[1:]


class TestAssembly:
    def test_load_vanishes_at_repulsion_threshold(self, ref_params):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        alpha = np.full(4, ref_params.alphaR)
        _, _, _, rhs = assemble_velocity_system(alpha, 3, ref_params, mesh)
        np.testing.assert_array_equal(rhs, 0.0)

    def test_single_element_hand_assembly(self, ref_params):
        cfg = small_config(h=0.5, ellm=2.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        alpha = np.array([0.5, 0.0, 0.0, 0.0])
        lower, diag, upper, rhs = assemble_velocity_system(alpha, 1, ref_params, mesh)
        assert lower.size == 0 and upper.size == 0
        # k*h*r/3 + mu*alpha/h with r = 1
        assert diag[0] == pytest.approx(0.5 / 3 + 1.0, rel=1e-15)
        assert rhs[0] == 0.0  # H(0.5) = 0 below the repulsion threshold

    def test_matches_dense_oracle_on_random_cells(self, ref_params, rng):
        cfg = small_config(h=0.25, ellm=2.0, ell0=1.5, delta=0.01)
        mesh = build_mesh(cfg)
        for _ in range(20):
            alpha = np.zeros(8)
            alpha[:6] = rng.uniform(0.2, 0.95, 6)
            lower, diag, upper, rhs = assemble_velocity_system(alpha, 6, ref_params, mesh)
            band = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
            dense, dense_rhs = dense_velocity_oracle(alpha, 6, ref_params, mesh.h)
            np.testing.assert_allclose(band, dense, rtol=1e-13, atol=1e-16)
            np.testing.assert_allclose(rhs, dense_rhs, rtol=1e-13, atol=1e-16)

    def test_symmetry_and_positive_definiteness(self, ref_params, rng):
        cfg = small_config(h=0.1, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        alpha = np.zeros(10)
        alpha[:8] = rng.uniform(0.3, 0.9, 8)
        lower, diag, upper, rhs = assemble_velocity_system(alpha, 8, ref_params, mesh)
        np.testing.assert_array_equal(lower, upper)
        band = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        assert np.all(np.linalg.eigvalsh(band) > 0)

    def test_degenerate_coefficient_rejected(self, ref_params):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        with pytest.raises(DegenerateCoefficient):
            assemble_velocity_system(np.array([0.5, 1.0, 0.5, 0.0]), 3, ref_params, mesh)


class TestSolve:
    def test_zero_load_gives_zero_velocity(self, ref_params):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        alpha = np.array([0.5, 0.6, 0.7, 0.0])  # all below alphaR = 0.8
        u = solve_velocity(alpha, 3, ref_params, mesh)
        np.testing.assert_array_equal(u, 0.0)

    def test_empty_domain_gives_zero_field(self, ref_params):
        cfg = small_config(h=0.25, ellm=1.0, ell0=0.5, delta=0.01)
        mesh = build_mesh(cfg)
        u = solve_velocity(np.zeros(4), 0, ref_params, mesh)
        np.testing.assert_array_equal(u, 0.0)

    def test_solution_matches_dense_solve(self, ref_params, rng):
        cfg = small_config(h=0.2, ellm=2.0, ell0=1.0, delta=0.01)
        mesh = build_mesh(cfg)
        alpha = np.zeros(10)
        alpha[:7] = rng.uniform(0.5, 0.9, 7)
        u = solve_velocity(alpha, 7, ref_params, mesh)
        dense, rhs = dense_velocity_oracle(alpha, 7, ref_params, mesh.h)
        expected = np.linalg.solve(dense, rhs)
        np.testing.assert_allclose(u[1:8], expected, rtol=1e-12)
        assert u[0] == 0.0
        np.testing.assert_array_equal(u[8:], 0.0)

    def test_reference_initial_velocity_under_linf_bound(self, ref_params):
        cfg = reference_config()
        mesh = build_mesh(cfg)
        alpha = np.zeros(mesh.J)
        alpha[:20] = 0.8
        u = solve_velocity(alpha, 20, ref_params, mesh)
        bound = velocity_bounds(ref_params, cfg).u_max
        assert bound == pytest.approx(9.76011623508754, abs=1e-6)
        assert np.max(np.abs(u)) <= bound * (1 + 1e-9)

    def test_energy_estimate_on_admissible_states(self, ref_params, rng):
        # sqrt(mu)*||sqrt(alpha) du|| <= (1 + 1/sqrt(k)) sqrt(ellm/mu) *
        # |a_hi - alphaR| / |1 - a_hi|^2 while a_lo <= alpha <= a_hi
        a_lo, a_hi = 0.4, 0.9
        cfg = small_config(
            h=0.1, ellm=2.0, ell0=1.0, delta=0.001,
            a_star_lo=a_lo, a_star_hi=a_hi, m01=0.5, m02=0.85,
        )
        mesh = build_mesh(cfg)
        bound = (
            (1.0 + 1.0 / math.sqrt(ref_params.k))
            * math.sqrt(cfg.ellm / ref_params.mu)
            * abs(a_hi - ref_params.alphaR)
            / abs(1.0 - a_hi) ** 2
        )
        for _ in range(50):
            m = int(rng.integers(1, mesh.J))
            alpha = np.zeros(mesh.J)
            alpha[:m] = rng.uniform(a_lo, a_hi, m)
            u = solve_velocity(alpha, m, ref_params, mesh)
            grad = cellwise_velocity_gradient(u, m, mesh.h)
            energy = math.sqrt(
                float(np.sum(alpha[:m] * grad[:m] ** 2) * mesh.h)
            ) * math.sqrt(ref_params.mu)
            assert energy <= bound * (1 + 1e-9)

    def test_flux_bv_bound_on_admissible_states(self, ref_params, rng):
        from tumorsim import bv_norms
        from tumorsim.kernel import State

        a_lo, a_hi = 0.4, 0.9
        cfg = small_config(
            h=0.1, ellm=2.0, ell0=1.0, delta=0.001,
            a_star_lo=a_lo, a_star_hi=a_hi, m01=0.5, m02=0.85,
        )
        mesh = build_mesh(cfg)
        bv_bound = velocity_bounds(ref_params, cfg).bv_bound
        for _ in range(50):
            m = int(rng.integers(1, mesh.J))
            alpha = np.zeros(mesh.J)
            alpha[:m] = rng.uniform(a_lo, a_hi, m)
            u = solve_velocity(alpha, m, ref_params, mesh)
            state = State(n=0, alpha=alpha, u=u, c=np.ones(mesh.J + 1), radius_index=m)
            _, flux_bv = bv_norms(state, ref_params, mesh)
            assert flux_bv <= bv_bound * (1 + 1e-9)


class TestBounds:
    def test_all_zero_when_ceiling_sits_at_repulsion_threshold(self, ref_params):
        cfg = small_config(
            h=0.25, ellm=1.0, ell0=0.5, delta=0.01,
            a_star_lo=0.1, a_star_hi=0.8, m01=0.4, m02=0.7,
        )
        b = velocity_bounds(ref_params, cfg)
        assert b.u_max == 0.0
        assert b.bv_bound == 0.0
        assert b.flux_grad_neg_max == 0.0
        assert b.flux_grad_max == 0.0

    def test_reference_values(self, ref_params):
        b = velocity_bounds(ref_params, reference_config())
        assert b.u_max == pytest.approx(9.76011623508754, abs=1e-9)
        assert b.bv_bound == pytest.approx(14.549522246636702, abs=1e-9)
        assert b.flux_grad_max == pytest.approx(15.055695086142872, abs=1e-9)

    def test_u_max_inverse_in_viscosity(self):
        params = reference_params()
        doubled = ModelParamsWithMu(params, 2.0)
        cfg = reference_config()
        assert velocity_bounds(doubled, cfg).u_max == pytest.approx(
            velocity_bounds(params, cfg).u_max / 2.0, rel=1e-15
        )


def ModelParamsWithMu(params, mu):
    from dataclasses import replace

    return replace(params, mu=mu)
